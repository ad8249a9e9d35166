#include "crford/linalg.hpp"

#include <algorithm>
#include <complex>

namespace crford {

namespace {

FieldPtr common_field(const std::vector<NFElem>& es) {
    FieldPtr f = NumberField::rationals();
    for (const NFElem& e : es) {
        if (!e.field()) continue;
        if (e.field()->degree() > f->degree() || (f->is_rationals() && !e.field()->is_rationals()))
            f = e.field();
    }
    // sanity: everything must promote into f
    return f;
}

}  // namespace

Mat::Mat(size_t n, const FieldPtr& f) : n_(n), e_(n * n, f->from_rat(Rat(0))) {}

Mat Mat::identity(size_t n, const FieldPtr& f) {
    Mat m(n, f);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = f->from_rat(Rat(1));
    return m;
}

Mat Mat::from_rows(std::vector<std::vector<NFElem>> rows) {
    Mat m;
    m.n_ = rows.size();
    for (auto& r : rows) {
        if (r.size() != m.n_) throw Error("matrix rows must be square");
        for (auto& e : r) m.e_.push_back(std::move(e));
    }
    // promote everything into the largest field present
    FieldPtr f = common_field(m.e_);
    for (auto& e : m.e_) e = f->promote(e.field() ? e : NumberField::rationals()->from_rat(Rat(0)));
    return m;
}

const FieldPtr& Mat::field() const { return e_.at(0).field(); }

Mat Mat::operator*(const Mat& o) const {
    if (n_ != o.n_) throw Error("matrix dimension mismatch");
    Mat r(n_, field());
    for (size_t i = 0; i < n_; ++i)
        for (size_t k = 0; k < n_; ++k) {
            if (at(i, k).is_zero()) continue;
            for (size_t j = 0; j < n_; ++j)
                r.at(i, j) = r.at(i, j) + at(i, k) * o.at(k, j);
        }
    return r;
}

Mat Mat::operator+(const Mat& o) const {
    if (n_ != o.n_) throw Error("matrix dimension mismatch");
    Mat r = *this;
    for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = r.e_[i] + o.e_[i];
    return r;
}

Mat Mat::operator-(const Mat& o) const {
    if (n_ != o.n_) throw Error("matrix dimension mismatch");
    Mat r = *this;
    for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = r.e_[i] - o.e_[i];
    return r;
}

Mat Mat::operator*(const NFElem& s) const {
    Mat r = *this;
    for (auto& e : r.e_) e = e * s;
    return r;
}

Mat Mat::operator-() const {
    Mat r = *this;
    for (auto& e : r.e_) e = -e;
    return r;
}

bool Mat::operator==(const Mat& o) const {
    if (n_ != o.n_) return false;
    for (size_t i = 0; i < e_.size(); ++i)
        if (e_[i] != o.e_[i]) return false;
    return true;
}

std::vector<NFElem> Mat::apply(const std::vector<NFElem>& v) const {
    if (v.size() != n_) throw Error("vector dimension mismatch");
    std::vector<NFElem> r(n_, field()->from_rat(Rat(0)));
    for (size_t i = 0; i < n_; ++i)
        for (size_t j = 0; j < n_; ++j) r[i] = r[i] + at(i, j) * v[j];
    return r;
}

Mat Mat::transpose() const {
    Mat r(n_, field());
    for (size_t i = 0; i < n_; ++i)
        for (size_t j = 0; j < n_; ++j) r.at(j, i) = at(i, j);
    return r;
}

Mat Mat::conj_transpose() const {
    Mat r(n_, field());
    for (size_t i = 0; i < n_; ++i)
        for (size_t j = 0; j < n_; ++j) r.at(j, i) = at(i, j).conj();
    return r;
}

NFElem Mat::trace() const {
    NFElem t = field()->from_rat(Rat(0));
    for (size_t i = 0; i < n_; ++i) t = t + at(i, i);
    return t;
}

NFElem Mat::det() const {
    switch (n_) {
        case 1:
            return at(0, 0);
        case 2:
            return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
        case 3:
            return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
                   at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
                   at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
        default:
            throw Error("determinant implemented for n <= 3 only");
    }
}

Mat Mat::inverse() const {
    NFElem d = det();
    if (d.is_zero()) throw DivisionByZero("matrix is singular");
    Mat r(n_, field());
    if (n_ == 1) {
        r.at(0, 0) = d.inverse();
        return r;
    }
    if (n_ == 2) {
        NFElem di = d.inverse();
        r.at(0, 0) = at(1, 1) * di;
        r.at(0, 1) = -at(0, 1) * di;
        r.at(1, 0) = -at(1, 0) * di;
        r.at(1, 1) = at(0, 0) * di;
        return r;
    }
    if (n_ == 3) {
        NFElem di = d.inverse();
        for (size_t i = 0; i < 3; ++i)
            for (size_t j = 0; j < 3; ++j) {
                size_t r0 = (j + 1) % 3, r1 = (j + 2) % 3;
                size_t c0 = (i + 1) % 3, c1 = (i + 2) % 3;
                r.at(i, j) = (at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0)) * di;
            }
        return r;
    }
    throw Error("inverse implemented for n <= 3 only");
}

Mat Mat::pow(long k) const {
    if (k < 0) return inverse().pow(-k);
    Mat acc = identity(n_, field());
    Mat b = *this;
    for (unsigned long u = static_cast<unsigned long>(k); u; u >>= 1) {
        if (u & 1) acc = acc * b;
        if (u > 1) b = b * b;
    }
    return acc;
}

Mat Mat::promoted(const FieldPtr& f) const {
    Mat r = *this;
    for (auto& e : r.e_) e = f->promote(e);
    return r;
}

bool Mat::is_identity() const { return *this == identity(n_, field()); }

bool Mat::is_scalar() const {
    for (size_t i = 0; i < n_; ++i)
        for (size_t j = 0; j < n_; ++j) {
            if (i != j && !at(i, j).is_zero()) return false;
            if (i == j && at(i, i) != at(0, 0)) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------

HermitianForm::HermitianForm(Mat m) : h(std::move(m)) {
    if (h.dim() != 3) throw DegenerateForm("Hermitian form must be 3x3");
    if (h.conj_transpose() != h) throw DegenerateForm("matrix is not Hermitian");
}

NFElem HermitianForm::inner(const std::vector<NFElem>& u, const std::vector<NFElem>& v) const {
    NFElem s = h.field()->from_rat(Rat(0));
    for (size_t i = 0; i < 3; ++i) {
        NFElem row = h.field()->from_rat(Rat(0));
        for (size_t j = 0; j < 3; ++j) row = row + h.at(i, j) * h.field()->promote(u[j]);
        s = s + h.field()->promote(v[i]).conj() * row;
    }
    return s;
}

bool is_isometry(const Mat& m, const HermitianForm& h) {
    if (m.dim() != 3) throw Error("isometry check needs a 3x3 matrix");
    FieldPtr f = m.field()->knows(h.h.field().get()) ? m.field() : h.h.field();
    Mat mm = m.promoted(f), hh = h.h.promoted(f);
    return mm.conj_transpose() * hh * mm == hh;
}

std::pair<int, int> signature(const HermitianForm& h) {
    // All eigenvalues of a Hermitian matrix are real, so Descartes' rule on
    // the exact characteristic polynomial counts them by sign.
    if (h.h.det().is_zero()) throw DegenerateForm("form is degenerate");
    NFPoly chi = charpoly(h.h);
    std::vector<int> signs;
    for (int i = chi.degree(); i >= 0; --i) {
        int s = chi[static_cast<size_t>(i)].sign();
        if (s != 0) signs.push_back(s);
    }
    int p = 0;
    for (size_t i = 1; i < signs.size(); ++i)
        if (signs[i] != signs[i - 1]) ++p;
    return {p, 3 - p};
}

NFPoly charpoly(const Mat& m) {
    FieldPtr f = m.field();
    NFElem one = f->from_rat(Rat(1));
    if (m.dim() == 2)
        return NFPoly({m.det(), -m.trace(), one});
    if (m.dim() == 3) {
        // x^3 - tr x^2 + c2 x - det, c2 = sum of principal 2x2 minors
        NFElem c2 = (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1)) +
                    (m.at(0, 0) * m.at(2, 2) - m.at(0, 2) * m.at(2, 0)) +
                    (m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0));
        return NFPoly({-m.det(), c2, -m.trace(), one});
    }
    throw Error("charpoly implemented for n <= 3 only");
}

std::vector<std::vector<NFElem>> null_space(const Mat& m) {
    size_t n = m.dim();
    FieldPtr f = m.field();
    std::vector<std::vector<NFElem>> rows(n, std::vector<NFElem>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) rows[i][j] = m.at(i, j);
    std::vector<long> pivot_col;
    size_t r = 0;
    for (size_t c = 0; c < n && r < n; ++c) {
        size_t p = r;
        while (p < n && rows[p][c].is_zero()) ++p;
        if (p == n) continue;
        std::swap(rows[p], rows[r]);
        NFElem inv = rows[r][c].inverse();
        for (size_t j = 0; j < n; ++j) rows[r][j] = rows[r][j] * inv;
        for (size_t i = 0; i < n; ++i) {
            if (i == r || rows[i][c].is_zero()) continue;
            NFElem fct = rows[i][c];
            for (size_t j = 0; j < n; ++j) rows[i][j] = rows[i][j] - fct * rows[r][j];
        }
        pivot_col.push_back(static_cast<long>(c));
        ++r;
    }
    std::vector<std::vector<NFElem>> basis;
    for (size_t c = 0; c < n; ++c) {
        if (std::find(pivot_col.begin(), pivot_col.end(), static_cast<long>(c)) != pivot_col.end())
            continue;
        std::vector<NFElem> v(n, f->from_rat(Rat(0)));
        v[c] = f->from_rat(Rat(1));
        for (size_t i = 0; i < pivot_col.size(); ++i)
            v[static_cast<size_t>(pivot_col[i])] = -rows[i][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

Su21Result classify_su21(const Mat& m, const HermitianForm& h) {
    if (!is_isometry(m, h)) throw NotIsometry("matrix does not preserve the form");
    FieldPtr f = m.field();
    if (m.det() != f->from_rat(Rat(1))) throw NotIsometry("determinant is not 1");
    if (m.is_scalar()) return {Su21Class::IdentityLike, m.at(0, 0)};

    NFElem tau = m.trace();
    NFElem tbar = tau.conj();
    NFElem m2 = tau * tbar;                                // |tau|^2, real
    NFElem re3x2 = tau.pow(3) + tbar.pow(3);               // 2 Re(tau^3)
    NFElem disc = m2 * m2 - re3x2 * Rat(4) + m2 * Rat(18) - Rat(27);
    int s = disc.sign();
    if (s > 0) return {Su21Class::Loxodromic, std::nullopt};
    if (s < 0) return {Su21Class::RegularElliptic, std::nullopt};

    // boundary: repeated eigenvalue of unit modulus
    Mat id = Mat::identity(3, f);
    std::vector<NFElem> lambdas = {f->from_rat(Rat(1))};
    try {
        // primitive cube root of unity, if the field has one
        ComplexBox wa(RatInterval(Rat(-51, 100), Rat(-49, 100)),
                      RatInterval(Rat(85, 100), Rat(88, 100)));
        auto r = NumberField::adjoin_root(f, QPoly::from_ints({1, 1, 1}), wa);
        if (!r.extended) {
            lambdas.push_back(r.element);
            lambdas.push_back(r.element * r.element);
        }
    } catch (const Error&) {
        // no cube root of unity in the field; lambda = 1 is the only candidate
    }
    for (const NFElem& lam : lambdas) {
        Mat d = m - id * lam;
        if ((d * d * d) == Mat(3, f) && !(m == id * lam))
            return {Su21Class::ParabolicUnipotent, lam};
    }
    // semisimple iff the minimal polynomial is squarefree
    NFPoly chi = charpoly(m);
    NFPoly g = gcd(chi, chi.derivative());
    if (g.degree() == 0) return {Su21Class::EllipticBoundary, std::nullopt};
    return {Su21Class::ParabolicScrew, std::nullopt};
}

bool is_unipotent(const Mat& m) {
    if (m.dim() != 3) throw Error("unipotency test needs a 3x3 matrix");
    if (m.is_identity()) return false;
    FieldPtr f = m.field();
    if (m.trace() != f->from_rat(Rat(3))) return false;
    Mat d = m - Mat::identity(3, f);
    return (d * d * d) == Mat(3, f);
}

Psl2Class classify_psl2(const Mat& m) {
    if (m.dim() != 2) throw Error("PSL2 classification needs a 2x2 matrix");
    FieldPtr f = m.field();
    if (m.det() != f->from_rat(Rat(1))) throw NotIsometry("determinant is not 1");
    Mat id = Mat::identity(2, f);
    if (m == id || m == -id) return Psl2Class::Identity;
    NFElem t = m.trace();
    bool real = t.is_rational();
    if (!real) {
        try {
            real = t.is_real();
        } catch (const AdjoinRequired&) {
            real = false;
        }
    }
    if (!real) return Psl2Class::Loxodromic;
    NFElem d = t * t - Rat(4);
    int s = d.sign();
    if (s < 0) return Psl2Class::Elliptic;
    if (s == 0) return Psl2Class::Parabolic;
    return Psl2Class::Loxodromic;
}

bool projectively_equal(const Mat& m, const Mat& n) {
    if (m.dim() != n.dim()) return false;
    size_t d = m.dim();
    FieldPtr f = m.field()->knows(n.field().get()) ? m.field() : n.field();
    Mat a = m.promoted(f), b = n.promoted(f);
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j) {
            if (a.at(i, j).is_zero()) {
                if (!b.at(i, j).is_zero()) return false;
                continue;
            }
            NFElem lam = b.at(i, j) / a.at(i, j);
            if (lam.pow(static_cast<long>(d)) != f->from_rat(Rat(1))) return false;
            return b == a * lam;
        }
    return true;  // both zero
}

InFieldRoots roots_in_field(const NFPoly& p, const FieldPtr& f) {
    InFieldRoots out;
    if (p.degree() < 1) return out;
    size_t n = static_cast<size_t>(f->degree());
    // eliminate theta: p_abs(x) = Res_y(minpoly(y), sum_j c_j(y) x^j)
    std::vector<QPoly> by(n, QPoly());
    int dp = p.degree();
    for (size_t t = 0; t < n; ++t) {
        std::vector<Rat> xc(static_cast<size_t>(dp) + 1, Rat(0));
        for (int j = 0; j <= dp; ++j) {
            const auto& cf = p[static_cast<size_t>(j)].coeffs();
            if (t < cf.size()) xc[static_cast<size_t>(j)] = cf[t];
        }
        by[t] = QPoly(std::move(xc));
    }
    QPoly p_abs = f->is_rationals() ? by[0] : resultant_y(f->min_poly(), by);
    if (p_abs.is_zero()) throw Error("eigenvalue elimination degenerated");

    // approximate roots of p numerically, then decide membership exactly
    unsigned bits = 96;
    std::vector<std::complex<double>> cs(static_cast<size_t>(dp) + 1);
    for (int j = 0; j <= dp; ++j) {
        ComplexBox b = p[static_cast<size_t>(j)].embed(bits);
        cs[static_cast<size_t>(j)] = {b.re.mid().get_d(), b.im.mid().get_d()};
    }
    std::vector<std::complex<double>> z(static_cast<size_t>(dp));
    std::complex<double> seed(0.4, 0.9), pw(1, 0);
    for (int i = 0; i < dp; ++i) {
        pw *= seed;
        z[static_cast<size_t>(i)] = pw * (1.0 + std::abs(cs[static_cast<size_t>(dp)]));
    }
    auto eval = [&](std::complex<double> x) {
        std::complex<double> acc = 0;
        for (int j = dp; j >= 0; --j) acc = acc * x + cs[static_cast<size_t>(j)];
        return acc;
    };
    for (int it = 0; it < 500; ++it) {
        double moved = 0;
        for (int i = 0; i < dp; ++i) {
            std::complex<double> den = cs[static_cast<size_t>(dp)];
            for (int j = 0; j < dp; ++j)
                if (j != i) den *= z[static_cast<size_t>(i)] - z[static_cast<size_t>(j)];
            std::complex<double> st = eval(z[static_cast<size_t>(i)]) / den;
            z[static_cast<size_t>(i)] -= st;
            moved = std::max(moved, std::abs(st));
        }
        if (moved < 1e-13) break;
    }
    auto seen_root = [&](const NFElem& r) {
        for (const NFElem& s : out.roots)
            if (s == r) return true;
        return false;
    };
    auto seen_missing = [&](const QPoly& q) {
        for (const QPoly& s : out.missing)
            if (s.coeffs() == q.coeffs()) return true;
        return false;
    };
    for (int i = 0; i < dp; ++i) {
        double sl = 1e-6 * (1 + std::abs(z[static_cast<size_t>(i)]));
        ComplexBox ap(RatInterval(Rat(z[static_cast<size_t>(i)].real() - sl),
                                  Rat(z[static_cast<size_t>(i)].real() + sl)),
                      RatInterval(Rat(z[static_cast<size_t>(i)].imag() - sl),
                                  Rat(z[static_cast<size_t>(i)].imag() + sl)));
        try {
            auto r = NumberField::adjoin_root(f, p_abs, ap);
            if (!r.extended) {
                if (!p.eval(r.element).is_zero()) continue;  // root of p_abs from another embedding
                if (!seen_root(r.element)) out.roots.push_back(r.element);
            } else {
                QPoly need = r.field->min_poly();
                // report the factor of p_abs that was needed, not the tower generator
                QPoly hs = primitive_integer(squarefree_part(p_abs));
                auto dk = isolate_roots(hs);
                QPoly mp = min_poly_factor_at(
                    hs, dk,
                    [&]() {
                        // nearest disk to the approximation
                        size_t best = 0;
                        Rat bd;
                        bool first = true;
                        Rat cr = ap.re.mid(), ci = ap.im.mid();
                        for (size_t j = 0; j < dk.size(); ++j) {
                            Rat d2 = (cr - dk[j].re) * (cr - dk[j].re) +
                                     (ci - dk[j].im) * (ci - dk[j].im);
                            if (first || d2 < bd) {
                                bd = d2;
                                best = j;
                                first = false;
                            }
                        }
                        return best;
                    }());
                if (!seen_missing(mp)) out.missing.push_back(mp);
            }
        } catch (const RejectAmbiguousRoot&) {
            throw PrecisionExhausted("eigenvalue approximation too coarse");
        }
    }
    return out;
}

std::vector<std::vector<NFElem>> fixed_points_boundary(const Mat& m, const HermitianForm& h) {
    if (m.dim() != 3) throw Error("boundary fixed points need a 3x3 matrix");
    if (m.is_scalar()) throw Error("identity-like matrix fixes everything");
    FieldPtr f = m.field();
    NFPoly chi = charpoly(m);
    InFieldRoots rts = roots_in_field(chi, f);
    if (!rts.missing.empty()) throw EigenAdjoinRequired(rts.missing.front());
    std::vector<std::vector<NFElem>> out;
    for (const NFElem& lam : rts.roots) {
        Mat d = m - Mat::identity(3, f) * lam;
        for (auto& v : null_space(d)) {
            if (h.inner(v, v).is_zero()) out.push_back(std::move(v));
        }
    }
    return out;
}

std::vector<P1Point> fixed_points_psl2(const Mat& m) {
    if (m.dim() != 2) throw Error("Moebius fixed points need a 2x2 matrix");
    FieldPtr f = m.field();
    if (m.is_scalar()) throw Error("identity-like matrix fixes everything");
    const NFElem& a = m.at(0, 0);
    const NFElem& b = m.at(0, 1);
    const NFElem& c = m.at(1, 0);
    const NFElem& d = m.at(1, 1);
    std::vector<P1Point> out;
    if (c.is_zero()) {
        out.push_back({true, f->from_rat(Rat(0))});
        if (a != d) out.push_back({false, b / (d - a)});
        return out;
    }
    // c z^2 + (d - a) z - b = 0
    NFElem disc = (d - a) * (d - a) + b * c * Rat(4);
    if (disc.is_zero()) {
        out.push_back({false, (a - d) / (c * Rat(2))});
        return out;
    }
    auto r = NumberField::adjoin_sqrt(f, disc);
    if (r.extended) throw EigenAdjoinRequired(NumberField::abs_min_poly(r.element));
    NFElem s = r.element;
    out.push_back({false, ((a - d) + s) / (c * Rat(2))});
    out.push_back({false, ((a - d) - s) / (c * Rat(2))});
    return out;
}

}  // namespace crford
