#pragma once

#include "crford/numfield.hpp"

namespace crford {

// Small dense matrix over one number field (2x2 or 3x3 in practice).
class Mat {
  public:
    Mat() = default;
    Mat(size_t n, const FieldPtr& f);
    static Mat identity(size_t n, const FieldPtr& f);
    static Mat from_rows(std::vector<std::vector<NFElem>> rows);

    size_t dim() const { return n_; }
    const NFElem& at(size_t r, size_t c) const { return e_[r * n_ + c]; }
    NFElem& at(size_t r, size_t c) { return e_[r * n_ + c]; }
    const FieldPtr& field() const;

    Mat operator*(const Mat& o) const;
    Mat operator+(const Mat& o) const;
    Mat operator-(const Mat& o) const;
    Mat operator*(const NFElem& s) const;
    Mat operator-() const;
    bool operator==(const Mat& o) const;
    bool operator!=(const Mat& o) const { return !(*this == o); }

    std::vector<NFElem> apply(const std::vector<NFElem>& v) const;

    Mat transpose() const;
    Mat conj_transpose() const;
    NFElem trace() const;
    NFElem det() const;  // n <= 3
    Mat inverse() const;
    Mat pow(long k) const;

    // entries promoted into a larger field of the recorded tower
    Mat promoted(const FieldPtr& f) const;

    bool is_identity() const;
    bool is_scalar() const;

  private:
    size_t n_ = 0;
    std::vector<NFElem> e_;
};

// Hermitian form on C^3; verified equal to its conjugate-transpose.
struct HermitianForm {
    Mat h;
    explicit HermitianForm(Mat m);
    // <u,v> = v* H u, linear in u, conjugate-linear in v
    NFElem inner(const std::vector<NFElem>& u, const std::vector<NFElem>& v) const;
};

bool is_isometry(const Mat& m, const HermitianForm& h);

// Inertia (p,q) of a nondegenerate Hermitian form, p+q = 3.
std::pair<int, int> signature(const HermitianForm& h);

enum class Su21Class {
    RegularElliptic,
    Loxodromic,
    ParabolicUnipotent,
    ParabolicScrew,
    EllipticBoundary,
    IdentityLike,
};

struct Su21Result {
    Su21Class cls;
    std::optional<NFElem> lambda;  // the unipotent eigenvalue, when relevant
};

// Exact classification of an element of SU(2,1) acting on complex hyperbolic
// 2-space, by the sign of the trace discriminant
// f(tau) = |tau|^4 - 8 Re(tau^3) + 18 |tau|^2 - 27
// with the boundary case f = 0 resolved by exact semisimplicity tests.
Su21Result classify_su21(const Mat& m, const HermitianForm& h);

// (M - I)^3 = 0 and tr M = 3 exactly; false for the identity itself.
bool is_unipotent(const Mat& m);

enum class Psl2Class { Elliptic, Parabolic, Loxodromic, Identity };

Psl2Class classify_psl2(const Mat& m);

// N = lambda M with lambda^3 = 1 (3x3) or lambda^2 = 1 (2x2).
bool projectively_equal(const Mat& m, const Mat& n);

// Characteristic polynomial (monic, degree = dim).
NFPoly charpoly(const Mat& m);

// Basis of the kernel, by exact row reduction.
std::vector<std::vector<NFElem>> null_space(const Mat& m);

// Roots of a polynomial over F that lie in F itself, plus the rational
// minimal polynomials of any roots that require an extension.
struct InFieldRoots {
    std::vector<NFElem> roots;
    std::vector<QPoly> missing;
};
InFieldRoots roots_in_field(const NFPoly& p, const FieldPtr& f);

// Thrown when a fixed-point computation needs an eigenvalue outside the
// coefficient field; carries the rational polynomial to adjoin.
struct EigenAdjoinRequired : AdjoinRequired {
    QPoly needed;
    explicit EigenAdjoinRequired(QPoly p)
        : AdjoinRequired("eigenvalue requires field extension by " + p.str()), needed(std::move(p)) {}
};

// Null eigenvectors of a 3x3 isometry (projective boundary fixed points).
std::vector<std::vector<NFElem>> fixed_points_boundary(const Mat& m, const HermitianForm& h);

// Fixed points of a Moebius transformation on the boundary of H^3.
struct P1Point {
    bool infinite = false;
    NFElem z;
};
std::vector<P1Point> fixed_points_psl2(const Mat& m);

}  // namespace crford
