#pragma once

#include <string>
#include <vector>

#include "crford/words.hpp"

namespace crford {

// Moebius maps are 2x2 matrices with det 1 acting on the upper half space
// model of H^3; the boundary action is z -> (az+b)/(cz+d).

struct IsometricSphere {
    Mat owner;          // the map whose sphere this is
    NFElem center;      // -d/c
    NFElem radius_sq;   // 1/(c conj(c))
};

// Throws FixesInfinity when the lower left entry vanishes.
IsometricSphere isometric_sphere(const Mat& g);

// Point of H^3 with exact coordinates: boundary coordinate z and squared
// height t2 > 0.  Working with t^2 keeps the extension formula inside the
// field.
struct H3Point {
    NFElem z;
    NFElem t2;
};

H3Point extend_to_h3(const Mat& g, const H3Point& p);

// |z - center|^2 + t2 == radius_sq, exactly.
bool on_sphere(const IsometricSphere& s, const H3Point& p);

// Translation ratio of a rank-2 parabolic pair after conjugating the common
// fixed point to infinity.  Conjugation-invariant of the ordered pair.
NFElem cusp_shape(const Mat& p1, const Mat& p2);

// Built-in census representations, in coordinates where infinity is a
// parabolic fixed point (the "Ford frame").
struct CensusRep {
    std::string name;
    FieldPtr field;
    std::vector<Mat> gens;       // generators used for sphere enumeration
    Presentation pres;           // two-generator presentation with peripheral pair
    std::vector<Mat> pres_gens;  // images of the presentation generators
    Mat t1, t2;                  // peripheral images conjugated to translations at infinity
    NFElem tau1, tau2;           // their translation amounts
    NFElem shape;                // tau2 / tau1
};

// Supported names: m004, m009, m015.
CensusRep census_rep(const std::string& name);

struct FordResult {
    std::vector<IsometricSphere> visible;
    std::vector<NFElem> radii_sq;  // distinct values among visible, descending
};

// Enumerates reduced words up to word_len in gens and their inverses,
// collects isometric spheres and their translates under the lattice spanned
// by t1, t2 (within two fundamental parallelograms of the origin), and keeps
// a sphere unless its highest point lies strictly inside another one.
FordResult partial_ford(const std::vector<Mat>& gens, const Mat& t1, const Mat& t2,
                        int word_len);

// Top view of the visible spheres: one circle each, colored by radius class,
// with the lattice fundamental parallelogram outlined.
std::string prism_svg(const FordResult& ford, const NFElem& tau1, const NFElem& tau2);
void emit_prism_svg(const FordResult& ford, const NFElem& tau1, const NFElem& tau2,
                    const std::string& path);

}  // namespace crford
