#pragma once

#include "crford/interval.hpp"
#include "crford/rational.hpp"

#include <string>
#include <vector>

namespace crford {

// Dense univariate polynomial over Q.  Coefficient 0 is the constant term;
// trailing zeros are stripped, so degree() == c.size()-1 and the zero
// polynomial has empty coefficient vector (degree -1).
class QPoly {
  public:
    QPoly() = default;
    explicit QPoly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }
    static QPoly constant(const Rat& v) { return QPoly(std::vector<Rat>{v}); }
    static QPoly x() { return QPoly({Rat(0), Rat(1)}); }
    // Convenience: from low-degree integer coefficient list.
    static QPoly from_ints(std::initializer_list<long> v);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const Rat& operator[](size_t i) const { return c_[i]; }
    const std::vector<Rat>& coeffs() const { return c_; }
    const Rat& lc() const { return c_.back(); }
    bool is_monic() const { return !c_.empty() && c_.back() == 1; }

    QPoly operator+(const QPoly& o) const;
    QPoly operator-(const QPoly& o) const;
    QPoly operator*(const QPoly& o) const;
    QPoly operator*(const Rat& k) const;
    QPoly operator-() const;
    bool operator==(const QPoly& o) const { return c_ == o.c_; }

    // Euclidean division; requires o nonzero.
    std::pair<QPoly, QPoly> divmod(const QPoly& o) const;
    QPoly derivative() const;
    QPoly monic() const;

    Rat eval(const Rat& x) const;
    ComplexBox eval(const ComplexBox& z) const;
    // Evaluate real-coefficient polynomial on a real interval (Horner, exact).
    RatInterval eval(const RatInterval& x) const;

    // p(k*x), p(x+a), p(-x), x^deg * p(1/x)
    QPoly scale_arg(const Rat& k) const;
    QPoly shift_arg(const Rat& a) const;
    QPoly reverse() const;
    // p(x^2)
    QPoly compose_square() const;

    std::string str(const std::string& var = "x") const;

  private:
    void trim();
    std::vector<Rat> c_;
};

QPoly gcd(const QPoly& a, const QPoly& b);
// g = u*a + v*b with g = gcd(a,b) monic.
QPoly ext_gcd(const QPoly& a, const QPoly& b, QPoly& u, QPoly& v);
QPoly squarefree_part(const QPoly& a);
// Multiply by lcm of denominators and divide by integer content; sign of lc
// preserved.
QPoly primitive_integer(const QPoly& a);
// Resultant of two rational polynomials (0 if either is zero).
Rat resultant(const QPoly& a, const QPoly& b);

// Bivariate elimination helper: B is a polynomial in y whose coefficients
// are polynomials in x.  Returns Res_y(A(y), B(x,y)) as a polynomial in x,
// computed by evaluation at rational points and Lagrange interpolation.
QPoly resultant_y(const QPoly& a_of_y, const std::vector<QPoly>& b_coeffs_in_y);

}  // namespace crford
