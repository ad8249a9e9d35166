#pragma once

#include "crford/certificate.hpp"
#include "crford/words.hpp"

#include <optional>

namespace crford {

// Boundary point of complex hyperbolic 2-space away from p_inf = (0,0,1), in
// the coordinates where the Hermitian form is the antidiagonal J.  The
// homogeneous lift (1, z, -|z|^2/2 + i t) is J-null.
struct HeisenbergPoint {
    NFElem z;  // complex
    NFElem t;  // real
};

// Standardized (3,3,5) group with the matrix field extended by a square root
// of -1, so that Heisenberg coordinates live in the field of the entries.
struct ChfordGroup {
    TriangleGroup G;  // reflections over the extended field, form J
    FieldPtr field;
    NFElem i;      // sqrt(-1) with positive imaginary embedding
    NFElem sqrt5;  // carried along for eigenvalue work
    Mat a;         // 2313, the lower triangular unipotent
    std::vector<NFElem> p_inf;
};

ChfordGroup chford_group(const StandardizedGroup& s);

NFElem real_part(const NFElem& z, const NFElem& i);
NFElem imag_part(const NFElem& z, const NFElem& i);

std::vector<NFElem> heis_lift(const HeisenbergPoint& p, const NFElem& i);
HeisenbergPoint heis_from_vector(const std::vector<NFElem>& v, const NFElem& i);
HeisenbergPoint heis_mul(const HeisenbergPoint& a, const HeisenbergPoint& b,
                         const NFElem& i);
HeisenbergPoint a_action(const HeisenbergPoint& p, const NFElem& i);

struct OrbitPoint {
    Word word;
    std::vector<NFElem> vector;           // image of (0,0,1), exact
    std::optional<HeisenbergPoint> heis;  // absent when the first coordinate is 0
    int index = 0;                        // face number, 0 when not a face
};

OrbitPoint orbit_point(const Word& w, const ChfordGroup& g, int index = 0);

// Numbering of the faces a^k b_j: k = 0 gives j, k > 0 gives 10(2k-1)+j,
// k < 0 gives 20|k|+j.
int face_index(int j, int k);
std::pair<int, int> face_of_index(int n);  // (j, k)
Word face_word(int n);                     // a^k g_j
OrbitPoint indexed_orbit_point(int n, const ChfordGroup& g);

// The ten core face words 32, 23, 2321, 1232, 12, 21, 232131, 131232,
// 32131232, 23213123.
const std::vector<std::string>& core_face_words();

bool projectively_equal_vec(const std::vector<NFElem>& u, const std::vector<NFElem>& v);

// The 18 tabulated 2-face correspondences of b_1 and b_2 under 23: for each
// row, 23 applied to the source orbit vector must match the target orbit
// vector projectively.
Certificate verify_side_pairing_table(const ChfordGroup& g);

struct RidgeCycle {
    std::vector<std::pair<int, int>> ridge_faces;  // visited face pairs
    Word cycle;    // closed cycle word, projectively the identity
    Word relator;  // reduction of the cycle to a power of 12, 23 or 13
    Certificate cert;
};

// Traces the orbit of the point triple (p, g_k p, g_l p) under the side
// pairings until it returns to the start modulo a power of a.  Throws
// CycleOverflow when the cycle does not close within 20 steps.
RidgeCycle trace_ridge_cycle(const ChfordGroup& g, int k, int l);

struct GammaPresentation {
    Presentation pres;  // x1 = 12, x2 = 23
    Certificate cert;
};

// <x1, x2 | x1^3, x2^3, (x1 x2)^5> with each relator checked to be scalar and
// (x1 x2)^m nonscalar for m < 5.
GammaPresentation presentation_of_gamma(const ChfordGroup& g);

struct SpinalSphere {
    OrbitPoint owner;
    HeisenbergPoint center;  // Heisenberg coordinates of the orbit point
    NFElem rho4;             // 4/|w1|^2; on the sphere |z - z0|^4 <= rho4
};

// Boundary sphere of the bisector |<P_inf, Z>| = |<g P_inf, Z>|.  Throws
// FixesInfinity when the orbit point is p_inf itself (first coordinate 0).
SpinalSphere spinal_sphere(const Word& w, const ChfordGroup& g);
SpinalSphere indexed_spinal_sphere(int n, const ChfordGroup& g);

struct HeisBox {
    RatInterval x, y, t;
};

// Certified box containing the sphere, from the Cygan-sphere form of the
// defining equation.
HeisBox spinal_bounds(const SpinalSphere& s, unsigned precision_bits);

// Signed defining function of the sphere at an exact Heisenberg point:
// negative inside, zero on the sphere, positive outside.
NFElem sphere_defect(const SpinalSphere& s, const HeisenbergPoint& p, const NFElem& i);

enum class SphereRelation { Disjoint, Overlap, Undecided };

// Disjoint when the certified boxes separate; overlap when exact sample
// points witness that neither closed ball contains the other and they meet;
// undecided otherwise.
SphereRelation spheres_disjoint(const SpinalSphere& s1, const SpinalSphere& s2,
                                const ChfordGroup& g, unsigned precision_bits);

// Smallest M such that every core-face box is separated from the a^m
// translate of every core-face box for all |m| >= M.
int separation_power(const ChfordGroup& g, unsigned precision_bits);

// Fixed point analysis at the vertex cycles: 13 and 321323 are elliptic of
// order 5 with an interior fixed point (negative vector certified), 2313 is
// unipotent with no interior fixed point.
Certificate vertex_cycle_check(const ChfordGroup& g);

struct ObservedRidge {
    int face;            // neighbouring face index
    double residual;     // refined activity residual
    int bisector_count;  // bisectors active at the refined ridge point
    bool observed;       // residual below 2^-40
};

struct AdjacencyReport {
    int face;
    std::vector<ObservedRidge> neighbors;  // sorted by face index
    unsigned precision_bits;
    int grid;
};

// Samples the spinal sphere of face j on a grid, refines towards each
// candidate neighbour, and reports which ridges are observed numerically.
// Purely floating point; results are observations, not certificates.
AdjacencyReport numeric_face_combinatorics(const ChfordGroup& g, int j,
                                           unsigned precision_bits = 80, int grid = 64);

}  // namespace crford
