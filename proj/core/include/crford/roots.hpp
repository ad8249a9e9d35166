#pragma once

#include "crford/qpoly.hpp"

#include <complex>
#include <vector>

namespace crford {

// Certified enclosure of a single simple root of a squarefree rational
// polynomial: the closed disk |z - (re + i*im)| <= rad contains exactly one
// root.  Centers are kept dyadic so refinement does not blow up denominators.
struct RootDisk {
    Rat re, im, rad;

    ComplexBox box() const {
        return {RatInterval(re - rad, re + rad), RatInterval(im - rad, im + rad)};
    }
    bool contains(const RootDisk& o) const {
        // o inside this: |c-c'| + rad' <= rad, checked via squares.
        Rat d2 = (re - o.re) * (re - o.re) + (im - o.im) * (im - o.im);
        Rat slack = rad - o.rad;
        return slack >= 0 && d2 <= slack * slack;
    }
    bool disjoint(const RootDisk& o) const {
        Rat d2 = (re - o.re) * (re - o.re) + (im - o.im) * (im - o.im);
        Rat s = rad + o.rad;
        return d2 > s * s;
    }
};

// All complex roots of a squarefree polynomial, as pairwise disjoint
// certified disks.  Deterministic order: by (re, im) of centers.
std::vector<RootDisk> isolate_roots(const QPoly& squarefree);

// Shrink the enclosure until rad <= target (Newton with dyadic rounding).
// The refined disk is contained in the input disk.
RootDisk refine_disk(const RootDisk& d, const QPoly& f, const Rat& target_rad);

// Irreducible factorization over Q of a nonzero rational polynomial
// (returned factors are primitive integer polynomials up to the order;
// multiplicities are preserved).
std::vector<QPoly> factor_rational(const QPoly& f);

bool is_irreducible(const QPoly& f);

// The unique irreducible factor (primitive integer) of a squarefree rational
// polynomial vanishing at root #target.  `roots` must be certified pairwise
// disjoint enclosures of all complex roots of f, e.g. from isolate_roots or
// assembled from enclosures of a product structure.
QPoly min_poly_factor_at(const QPoly& f, std::vector<RootDisk> roots, size_t target);

// Numeric initial guesses (Durand-Kerner); exposed for reuse by the numeric
// eigenvalue cross-checks.
std::vector<std::complex<double>> numeric_roots(const QPoly& f);

}  // namespace crford
