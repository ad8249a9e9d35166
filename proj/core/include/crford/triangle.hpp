#pragma once

#include "crford/linalg.hpp"

#include <array>

namespace crford {

// Reflection triangle group data: orders (p,q,r) of I1I2, I2I3, I3I1 and the
// unit complex number phi carrying the angular invariant.
struct TriangleParams {
    int p = 3, q = 3, r = 3;
    NFElem phi;
    bool conjugate_branch = false;  // phi replaced by its conjugate
};

enum class Admissibility { Admissible, Boundary, Inadmissible };

// cos(pi/n) for n in {2,3,4,5,6}; extends *field as needed (sqrt2, sqrt3,
// sqrt5).  Larger n is rejected with ExtensionFailure.
NFElem cos_pi_over(int n, FieldPtr& field);

// The Hermitian matrix with unit diagonal and off-diagonal entries
//   H12 = -cos(pi/p),  H23 = -cos(pi/q),  H13 = -cos(pi/r) * phi,
// over a common field containing phi and the three cosines.
HermitianForm triangle_form(int p, int q, int r, const NFElem& phi);

// Certified sign of det H: negative / zero / positive.
Admissibility admissibility(const TriangleParams& tp);

// Order-2 complex reflections in the polar basis: I_k(e_j) = -e_j + 2 H_kj e_k.
std::array<Mat, 3> reflection_generators(const HermitianForm& h);

struct TriangleGroup {
    TriangleParams params;
    HermitianForm H;
    Mat I1, I2, I3;
    FieldPtr field;
};

// Builds the group after verifying |phi| = 1 exactly and det H < 0.
TriangleGroup make_triangle_group(int p, int q, int r, const NFElem& phi);

// Solves trace(I2 I3 I1 I3) = 3 symbolically over the cosine field: the trace
// is a Laurent polynomial in phi, symmetric under phi -> 1/phi, hence a
// polynomial in y = phi + 1/phi = 2 Re(phi).  Returns the admissible solution
// with Im(phi) > 0 (or its conjugate when conjugate_branch is set).
TriangleParams solve_accidental_parabolic(int p, int q, int r, bool conjugate_branch = false);

struct StandardizedGroup {
    Mat Q;             // change of basis with Q* H Q = J
    TriangleGroup group;  // generators conjugated by Q, over the form J
    bool closed_form_q = false;  // true when the tabulated (3,3,5) Q was used
};

// J is the antidiagonal form [[0,0,1],[0,1,0],[1,0,0]].  Conjugates the group
// so that a = I2 I3 I1 I3 becomes the lower triangular unipotent
// [[1,0,0],[1,1,0],[-1/2,-1,1]].  Requires a unipotent (throws NotParabolic).
StandardizedGroup conjugate_to_standard(const TriangleGroup& g);

}  // namespace crford
