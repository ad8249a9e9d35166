#include "crford/qpoly.hpp"

#include <sstream>

namespace crford {

void QPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

QPoly QPoly::from_ints(std::initializer_list<long> v) {
    std::vector<Rat> c;
    c.reserve(v.size());
    for (long x : v) c.emplace_back(x);
    return QPoly(std::move(c));
}

QPoly QPoly::operator+(const QPoly& o) const {
    std::vector<Rat> r(std::max(c_.size(), o.c_.size()), Rat(0));
    for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i];
    for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return QPoly(std::move(r));
}

QPoly QPoly::operator-(const QPoly& o) const { return *this + (-o); }

QPoly QPoly::operator-() const {
    std::vector<Rat> r(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = -c_[i];
    return QPoly(std::move(r));
}

QPoly QPoly::operator*(const QPoly& o) const {
    if (is_zero() || o.is_zero()) return {};
    std::vector<Rat> r(c_.size() + o.c_.size() - 1, Rat(0));
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return QPoly(std::move(r));
}

QPoly QPoly::operator*(const Rat& k) const {
    std::vector<Rat> r(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i] * k;
    return QPoly(std::move(r));
}

std::pair<QPoly, QPoly> QPoly::divmod(const QPoly& o) const {
    if (o.is_zero()) throw DivisionByZero("polynomial division by zero");
    std::vector<Rat> rem = c_;
    int dr = static_cast<int>(rem.size()) - 1;
    int dd = o.degree();
    if (dr < dd) return {QPoly{}, *this};
    std::vector<Rat> quot(dr - dd + 1, Rat(0));
    for (int i = dr; i >= dd; --i) {
        if (rem[i] == 0) continue;
        Rat q = rem[i] / o.c_[dd];
        quot[i - dd] = q;
        for (int j = 0; j <= dd; ++j) rem[i - dd + j] -= q * o.c_[j];
    }
    return {QPoly(std::move(quot)), QPoly(std::move(rem))};
}

QPoly QPoly::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rat> r(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Rat(static_cast<long>(i));
    return QPoly(std::move(r));
}

QPoly QPoly::monic() const {
    if (is_zero()) return {};
    return *this * (1 / lc());
}

Rat QPoly::eval(const Rat& x) const {
    Rat acc(0);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
}

ComplexBox QPoly::eval(const ComplexBox& z) const {
    ComplexBox acc;
    for (size_t i = c_.size(); i-- > 0;) acc = acc * z + ComplexBox(c_[i], Rat(0));
    return acc;
}

RatInterval QPoly::eval(const RatInterval& x) const {
    RatInterval acc;
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + RatInterval(c_[i]);
    return acc;
}

QPoly QPoly::scale_arg(const Rat& k) const {
    std::vector<Rat> r = c_;
    Rat p(1);
    for (size_t i = 0; i < r.size(); ++i) {
        r[i] *= p;
        p *= k;
    }
    return QPoly(std::move(r));
}

QPoly QPoly::shift_arg(const Rat& a) const {
    // Horner in (x + a)
    QPoly acc;
    QPoly lin({a, Rat(1)});
    for (size_t i = c_.size(); i-- > 0;) acc = acc * lin + constant(c_[i]);
    return acc;
}

QPoly QPoly::reverse() const {
    std::vector<Rat> r(c_.rbegin(), c_.rend());
    return QPoly(std::move(r));
}

QPoly QPoly::compose_square() const {
    if (is_zero()) return {};
    std::vector<Rat> r(2 * c_.size() - 1, Rat(0));
    for (size_t i = 0; i < c_.size(); ++i) r[2 * i] = c_[i];
    return QPoly(std::move(r));
}

std::string QPoly::str(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = c_.size(); i-- > 0;) {
        if (c_[i] == 0) continue;
        if (!first) os << (c_[i] > 0 ? " + " : " - ");
        else if (c_[i] < 0) os << "-";
        Rat a = abs(c_[i]);
        if (a != 1 || i == 0) os << a.get_str();
        if (i >= 1) {
            if (a != 1) os << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    return os.str();
}

QPoly gcd(const QPoly& a, const QPoly& b) {
    QPoly f = a, g = b;
    while (!g.is_zero()) {
        QPoly r = f.divmod(g).second;
        f = g;
        g = r;
    }
    return f.is_zero() ? f : f.monic();
}

QPoly ext_gcd(const QPoly& a, const QPoly& b, QPoly& u, QPoly& v) {
    QPoly r0 = a, r1 = b;
    QPoly u0 = QPoly::constant(1), u1;
    QPoly v0, v1 = QPoly::constant(1);
    while (!r1.is_zero()) {
        auto [q, r] = r0.divmod(r1);
        r0 = r1; r1 = r;
        QPoly un = u0 - q * u1, vn = v0 - q * v1;
        u0 = u1; u1 = un;
        v0 = v1; v1 = vn;
    }
    if (r0.is_zero()) { u = u0; v = v0; return r0; }
    Rat inv = 1 / r0.lc();
    u = u0 * inv;
    v = v0 * inv;
    return r0.monic();
}

QPoly squarefree_part(const QPoly& a) {
    if (a.degree() <= 1) return a.is_zero() ? a : a.monic();
    QPoly g = gcd(a, a.derivative());
    return a.divmod(g).first.monic();
}

QPoly primitive_integer(const QPoly& a) {
    if (a.is_zero()) return a;
    Int den(1);
    for (const Rat& q : a.coeffs()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den().get_mpz_t());
    std::vector<Rat> r;
    r.reserve(a.coeffs().size());
    Int content(0);
    for (const Rat& q : a.coeffs()) {
        Rat s = q * Rat(den);
        mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), s.get_num().get_mpz_t());
        r.push_back(s);
    }
    for (Rat& q : r) q /= Rat(content);
    return QPoly(std::move(r));
}

namespace {
Rat rat_pow(const Rat& base, unsigned long e) {
    Rat p;
    mpz_pow_ui(p.get_num_mpz_t(), base.get_num().get_mpz_t(), e);
    mpz_pow_ui(p.get_den_mpz_t(), base.get_den().get_mpz_t(), e);
    p.canonicalize();
    return p;
}
}  // namespace

Rat resultant(const QPoly& a, const QPoly& b) {
    if (a.is_zero() || b.is_zero()) return Rat(0);
    // Euclidean algorithm with the standard multiplier bookkeeping.
    QPoly f = a, g = b;
    Rat acc(1);
    while (true) {
        if (f.degree() < g.degree()) {
            if ((f.degree() % 2) && (g.degree() % 2)) acc = -acc;
            std::swap(f, g);
        }
        if (g.degree() == 0) return acc * rat_pow(g.lc(), f.degree());
        QPoly rem = f.divmod(g).second;
        if (rem.is_zero()) return Rat(0);
        // res(f,g) = (-1)^{df*dg} lc(g)^{df-dr} res(g, rem)
        long df = f.degree(), dg = g.degree(), dr = rem.degree();
        acc *= rat_pow(g.lc(), df - dr);
        if ((df % 2) && (dg % 2)) acc = -acc;
        f = g;
        g = rem;
    }
}

QPoly resultant_y(const QPoly& a_of_y, const std::vector<QPoly>& b_coeffs_in_y) {
    int deg_b_y = static_cast<int>(b_coeffs_in_y.size()) - 1;
    while (deg_b_y >= 0 && b_coeffs_in_y[deg_b_y].is_zero()) --deg_b_y;
    if (a_of_y.is_zero() || deg_b_y < 0) return {};
    int max_x = 0;
    for (const QPoly& p : b_coeffs_in_y) max_x = std::max(max_x, p.degree());
    // deg_x Res <= deg_y(A) * deg_x(B); sample enough points.
    int bound = a_of_y.degree() * max_x + 1;
    std::vector<Rat> xs, ys;
    long pt = 0;
    while (static_cast<int>(xs.size()) < bound + 1) {
        Rat x(pt++);
        // Specialize B at x; skip points where leading y-coefficient vanishes
        // (they would compute the resultant of a lower-degree specialization).
        if (b_coeffs_in_y[deg_b_y].eval(x) == 0) continue;
        std::vector<Rat> bc(deg_b_y + 1);
        for (int i = 0; i <= deg_b_y; ++i) bc[i] = b_coeffs_in_y[i].eval(x);
        xs.push_back(x);
        ys.push_back(resultant(a_of_y, QPoly(std::move(bc))));
    }
    // Lagrange interpolation (Newton form).
    size_t n = xs.size();
    std::vector<Rat> divided = ys;
    for (size_t j = 1; j < n; ++j)
        for (size_t i = n - 1; i >= j; --i)
            divided[i] = (divided[i] - divided[i - 1]) / (xs[i] - xs[i - j]);
    QPoly result = QPoly::constant(divided[n - 1]);
    for (size_t i = n - 1; i-- > 0;) {
        result = result * QPoly({-xs[i], Rat(1)}) + QPoly::constant(divided[i]);
    }
    return result;
}

}  // namespace crford
