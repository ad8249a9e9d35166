#pragma once

#include "crford/rational.hpp"

#include <algorithm>
#include <ostream>

namespace crford {

// Closed interval with exact rational endpoints.  All operations are exact,
// so enclosures never suffer rounding slop; widths are controlled by the
// caller via refinement of the inputs.
struct RatInterval {
    Rat lo, hi;

    RatInterval() : lo(0), hi(0) {}
    RatInterval(const Rat& v) : lo(v), hi(v) {}
    RatInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw Error("inverted interval");
    }

    Rat width() const { return hi - lo; }
    Rat mid() const { return (lo + hi) / 2; }
    bool contains(const Rat& v) const { return lo <= v && v <= hi; }
    bool contains_zero() const { return lo <= 0 && 0 <= hi; }
    bool is_point() const { return lo == hi; }

    RatInterval operator-() const { return {-hi, -lo}; }
    RatInterval operator+(const RatInterval& o) const { return {lo + o.lo, hi + o.hi}; }
    RatInterval operator-(const RatInterval& o) const { return {lo - o.hi, hi - o.lo}; }
    RatInterval operator*(const RatInterval& o) const {
        Rat a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
        return {std::min(std::min(a, b), std::min(c, d)),
                std::max(std::max(a, b), std::max(c, d))};
    }
    RatInterval operator/(const RatInterval& o) const {
        if (o.contains_zero()) throw DivisionByZero("interval division by zero");
        Rat a = lo / o.lo, b = lo / o.hi, c = hi / o.lo, d = hi / o.hi;
        return {std::min(std::min(a, b), std::min(c, d)),
                std::max(std::max(a, b), std::max(c, d))};
    }

    bool disjoint(const RatInterval& o) const { return hi < o.lo || o.hi < lo; }

    static RatInterval hull(const RatInterval& a, const RatInterval& b) {
        return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
    }
    // Intersection; throws on empty.
    RatInterval meet(const RatInterval& o) const {
        return {std::max(lo, o.lo), std::min(hi, o.hi)};
    }
};

inline std::ostream& operator<<(std::ostream& os, const RatInterval& iv) {
    return os << "[" << iv.lo.get_str() << ", " << iv.hi.get_str() << "]";
}

// Axis-aligned complex rectangle with rational endpoints.
struct ComplexBox {
    RatInterval re, im;

    ComplexBox() = default;
    ComplexBox(RatInterval r, RatInterval i) : re(std::move(r)), im(std::move(i)) {}
    ComplexBox(const Rat& r, const Rat& i) : re(r), im(i) {}

    ComplexBox operator+(const ComplexBox& o) const { return {re + o.re, im + o.im}; }
    ComplexBox operator-(const ComplexBox& o) const { return {re - o.re, im - o.im}; }
    ComplexBox operator*(const ComplexBox& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    ComplexBox conj() const { return {re, -im}; }
    RatInterval norm_sq() const { return re * re + im * im; }
    ComplexBox operator/(const ComplexBox& o) const {
        RatInterval n = o.norm_sq();
        if (n.contains_zero()) throw DivisionByZero("complex box division by zero");
        ComplexBox num = *this * o.conj();
        return {num.re / n, num.im / n};
    }

    Rat width() const { return std::max(re.width(), im.width()); }
    bool contains_zero() const { return re.contains_zero() && im.contains_zero(); }
    bool disjoint(const ComplexBox& o) const {
        return re.disjoint(o.re) || im.disjoint(o.im);
    }
    // Upper bound on |z| over the box.
    Rat abs_upper() const { return sqrt_upper(norm_sq().hi); }
    Rat abs_lower() const {
        Rat n = norm_sq().lo;
        return n <= 0 ? Rat(0) : sqrt_lower(n);
    }
};

}  // namespace crford
