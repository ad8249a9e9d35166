#include "crford/numfield.hpp"

#include <algorithm>
#include <functional>

namespace crford {

namespace {

// Reduce a coefficient vector modulo a monic polynomial, in place.
std::vector<Rat> reduce_mod(std::vector<Rat> v, const QPoly& mp) {
    size_t n = static_cast<size_t>(mp.degree());
    for (size_t i = v.size(); i-- > n;) {
        if (v[i] == 0) continue;
        Rat c = v[i];
        v[i] = 0;
        for (size_t j = 0; j < n; ++j) v[i - n + j] -= c * mp[j];
    }
    v.resize(n, Rat(0));
    return v;
}

NFElem eval_qpoly(const QPoly& p, const NFElem& x) {
    NFElem acc = x.field()->from_rat(Rat(0));
    for (size_t i = p.coeffs().size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

NFElem eval_coeffs(const std::vector<Rat>& c, const NFElem& x) {
    NFElem acc = x.field()->from_rat(Rat(0));
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

using BoxFn = std::function<ComplexBox(unsigned)>;

// Identify which certified root disk of P contains the value produced by
// `val`, which must be an exact root of P.  Refines disks as needed.
size_t which_root(const QPoly& P, std::vector<RootDisk>& disks, const BoxFn& val) {
    unsigned bits = 64;
    for (int round = 0; round < 24; ++round, bits *= 2) {
        ComplexBox b = val(bits);
        RootDisk vd{b.re.mid(), b.im.mid(), b.re.width() + b.im.width()};
        long hit = -1;
        bool multi = false;
        for (size_t j = 0; j < disks.size(); ++j) {
            if (!vd.disjoint(disks[j])) {
                if (hit >= 0) multi = true;
                hit = static_cast<long>(j);
            }
        }
        if (hit >= 0 && !multi) return static_cast<size_t>(hit);
        for (auto& d : disks) d = refine_disk(d, P, d.rad / 16);
    }
    throw PrecisionExhausted("root identification did not resolve");
}

// Pick the root disk closest to the approximation; the nearest root must be
// at least four times closer than any other.
size_t select_root(const QPoly& P, std::vector<RootDisk>& disks, const ComplexBox& approx) {
    Rat small(1, Int(1) << 96);
    for (auto& d : disks)
        if (d.rad > small) d = refine_disk(d, P, small);
    Rat cr = approx.re.mid(), ci = approx.im.mid();
    long best = -1;
    Rat d_best;
    for (size_t j = 0; j < disks.size(); ++j) {
        Rat d2 = (cr - disks[j].re) * (cr - disks[j].re) + (ci - disks[j].im) * (ci - disks[j].im);
        if (best < 0 || d2 < d_best) {
            d_best = d2;
            best = static_cast<long>(j);
        }
    }
    bool have_second = false;
    Rat d_second;
    for (size_t j = 0; j < disks.size(); ++j) {
        if (static_cast<long>(j) == best) continue;
        Rat d2 = (cr - disks[j].re) * (cr - disks[j].re) + (ci - disks[j].im) * (ci - disks[j].im);
        if (!have_second || d2 < d_second) {
            d_second = d2;
            have_second = true;
        }
    }
    if (have_second && 16 * d_best >= d_second)
        throw RejectAmbiguousRoot("approximation does not single out a root");
    return static_cast<size_t>(best);
}

// Solve the square rational system A x = b by Gaussian elimination.
std::vector<Rat> solve_linear(std::vector<std::vector<Rat>> A, std::vector<Rat> b) {
    size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && A[piv][col] == 0) ++piv;
        if (piv == n) throw Error("singular linear system");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        Rat inv = Rat(1) / A[col][col];
        for (size_t j = col; j < n; ++j) A[col][j] *= inv;
        b[col] *= inv;
        for (size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col] == 0) continue;
            Rat f = A[r][col];
            for (size_t j = col; j < n; ++j) A[r][j] -= f * A[col][j];
            b[r] -= f * b[col];
        }
    }
    return b;
}

}  // namespace

// ---------------------------------------------------------------------------
// NFElem

NFElem::NFElem(FieldPtr field, std::vector<Rat> coeffs) : field_(std::move(field)) {
    size_t n = static_cast<size_t>(field_->degree());
    if (coeffs.size() > n)
        c_ = reduce_mod(std::move(coeffs), field_->min_poly());
    else {
        c_ = std::move(coeffs);
        c_.resize(n, Rat(0));
    }
}

bool NFElem::is_zero() const {
    for (const Rat& q : c_)
        if (q != 0) return false;
    return true;
}

bool NFElem::is_rational() const {
    for (size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

Rat NFElem::rat_value() const {
    if (!is_rational()) throw Error("element is not rational");
    return c_.empty() ? Rat(0) : c_[0];
}

void NFElem::check_same(const NFElem& o, NFElem& ap, NFElem& bp) const {
    NFElem a = field_ ? *this : NumberField::rationals()->from_rat(Rat(0));
    NFElem b = o.field_ ? o : NumberField::rationals()->from_rat(Rat(0));
    if (a.field_.get() == b.field_.get()) {
        ap = a;
        bp = b;
        return;
    }
    if (a.field_->knows(b.field_.get())) {
        bp = a.field_->promote(b);
        ap = std::move(a);
        return;
    }
    if (b.field_->knows(a.field_.get())) {
        ap = b.field_->promote(a);
        bp = std::move(b);
        return;
    }
    throw FieldMismatch("elements of unrelated number fields");
}

NFElem NFElem::operator+(const NFElem& o) const {
    NFElem a, b;
    check_same(o, a, b);
    for (size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
    return a;
}

NFElem NFElem::operator-(const NFElem& o) const {
    NFElem a, b;
    check_same(o, a, b);
    for (size_t i = 0; i < a.c_.size(); ++i) a.c_[i] -= b.c_[i];
    return a;
}

NFElem NFElem::operator*(const NFElem& o) const {
    NFElem a, b;
    check_same(o, a, b);
    size_t n = a.c_.size();
    std::vector<Rat> conv(2 * n - 1, Rat(0));
    for (size_t i = 0; i < n; ++i) {
        if (a.c_[i] == 0) continue;
        for (size_t j = 0; j < n; ++j) conv[i + j] += a.c_[i] * b.c_[j];
    }
    a.c_ = reduce_mod(std::move(conv), a.field_->min_poly());
    return a;
}

NFElem NFElem::operator-() const {
    NFElem a = *this;
    for (Rat& q : a.c_) q = -q;
    return a;
}

NFElem NFElem::inverse() const {
    if (!field_ || field_->is_rationals()) {
        Rat v = c_.empty() ? Rat(0) : c_[0];
        if (v == 0) throw DivisionByZero("inverse of zero");
        return NumberField::rationals()->from_rat(Rat(1) / v);
    }
    if (is_zero()) throw DivisionByZero("inverse of zero");
    QPoly a{std::vector<Rat>(c_)};
    QPoly u, v;
    QPoly g = ext_gcd(a, field_->min_poly(), u, v);
    if (g.degree() != 0) throw Error("reducible minimal polynomial detected");
    return NFElem(field_, u.coeffs());
}

NFElem NFElem::operator/(const NFElem& o) const { return *this * o.inverse(); }

NFElem NFElem::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    NFElem acc = (field_ ? field_ : NumberField::rationals())->from_rat(Rat(1));
    NFElem b = *this;
    for (unsigned long u = static_cast<unsigned long>(e); u; u >>= 1) {
        if (u & 1) acc = acc * b;
        if (u > 1) b = b * b;
    }
    return acc;
}

bool NFElem::operator==(const NFElem& o) const { return (*this - o).is_zero(); }

NFElem NFElem::operator+(const Rat& q) const {
    return *this + NumberField::rationals()->from_rat(q);
}
NFElem NFElem::operator-(const Rat& q) const {
    return *this - NumberField::rationals()->from_rat(q);
}
NFElem NFElem::operator*(const Rat& q) const {
    NFElem a = field_ ? *this : NumberField::rationals()->from_rat(Rat(0));
    for (Rat& c : a.c_) c *= q;
    return a;
}
NFElem NFElem::operator/(const Rat& q) const {
    if (q == 0) throw DivisionByZero("division by zero rational");
    return *this * (Rat(1) / q);
}

NFElem NFElem::conj() const {
    if (!field_ || field_->is_rationals())
        return field_ ? *this : NumberField::rationals()->from_rat(Rat(0));
    if (!field_->has_conj())
        throw AdjoinRequired("field is not closed under complex conjugation");
    if (is_rational()) return *this;
    NFElem ct(field_, field_->conj_theta());
    return eval_coeffs(c_, ct);
}

bool NFElem::is_real() const {
    if (is_rational()) return true;
    return conj() == *this;
}

ComplexBox NFElem::embed(unsigned precision_bits) const {
    if (!field_ || field_->is_rationals() || is_rational())
        return ComplexBox(c_.empty() ? Rat(0) : c_[0], Rat(0));
    if (precision_bits < 2) precision_bits = 2;
    Rat target(Int(1), Int(1) << (precision_bits - 1));
    for (unsigned w = precision_bits + 8; w <= (1u << 18); w *= 2) {
        ComplexBox tb = field_->theta_box(w);
        ComplexBox acc(Rat(0), Rat(0));
        for (size_t i = c_.size(); i-- > 0;) acc = acc * tb + ComplexBox(c_[i], Rat(0));
        if (acc.re.width() < target && acc.im.width() < target) return acc;
    }
    throw PrecisionExhausted("embedding did not reach requested width");
}

int NFElem::sign() const {
    if (is_zero()) return 0;
    if (is_rational()) return c_[0] > 0 ? 1 : -1;
    if (!is_real()) throw NotReal("sign of a non-real element");
    for (unsigned bits = 128; bits <= NumberField::kPrecisionCap; bits *= 2) {
        ComplexBox b = embed(bits);
        if (!b.re.contains_zero()) return b.re.lo > 0 ? 1 : -1;
    }
    throw PrecisionExhausted("sign did not separate from zero");
}

int NFElem::rep_cmp(const NFElem& a, const NFElem& b) {
    const NumberField* fa = a.field_.get();
    const NumberField* fb = b.field_.get();
    if (fa != fb) return fa < fb ? -1 : 1;
    if (a.c_.size() != b.c_.size()) return a.c_.size() < b.c_.size() ? -1 : 1;
    for (size_t i = 0; i < a.c_.size(); ++i) {
        int c = mpq_cmp(a.c_[i].get_mpq_t(), b.c_[i].get_mpq_t());
        if (c) return c < 0 ? -1 : 1;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// NFPoly

void NFPoly::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

NFPoly NFPoly::from_qpoly(const QPoly& p, const FieldPtr& f) {
    std::vector<NFElem> c;
    c.reserve(p.coeffs().size());
    for (const Rat& q : p.coeffs()) c.push_back(f->from_rat(q));
    return NFPoly(std::move(c));
}

NFPoly NFPoly::operator+(const NFPoly& o) const {
    std::vector<NFElem> r(std::max(c_.size(), o.c_.size()));
    for (size_t i = 0; i < r.size(); ++i) {
        if (i < c_.size() && i < o.c_.size())
            r[i] = c_[i] + o.c_[i];
        else if (i < c_.size())
            r[i] = c_[i];
        else
            r[i] = o.c_[i];
    }
    return NFPoly(std::move(r));
}

NFPoly NFPoly::operator-(const NFPoly& o) const {
    std::vector<NFElem> r(std::max(c_.size(), o.c_.size()));
    for (size_t i = 0; i < r.size(); ++i) {
        if (i < c_.size() && i < o.c_.size())
            r[i] = c_[i] - o.c_[i];
        else if (i < c_.size())
            r[i] = c_[i];
        else
            r[i] = -o.c_[i];
    }
    return NFPoly(std::move(r));
}

NFPoly NFPoly::operator*(const NFPoly& o) const {
    if (is_zero() || o.is_zero()) return NFPoly();
    std::vector<NFElem> r(c_.size() + o.c_.size() - 1);
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) {
            NFElem t = c_[i] * o.c_[j];
            r[i + j] = r[i + j].field() ? r[i + j] + t : t;
        }
    return NFPoly(std::move(r));
}

std::pair<NFPoly, NFPoly> NFPoly::divmod(const NFPoly& o) const {
    if (o.is_zero()) throw DivisionByZero("polynomial division by zero");
    NFPoly rem = *this;
    if (rem.degree() < o.degree()) return {NFPoly(), rem};
    NFElem lcinv = o.c_.back().inverse();
    std::vector<NFElem> q(static_cast<size_t>(rem.degree() - o.degree() + 1));
    while (!rem.is_zero() && rem.degree() >= o.degree()) {
        size_t sh = static_cast<size_t>(rem.degree() - o.degree());
        NFElem f = rem.c_.back() * lcinv;
        q[sh] = f;
        for (size_t i = 0; i < o.c_.size(); ++i) rem.c_[sh + i] = rem.c_[sh + i] - f * o.c_[i];
        rem.trim();
    }
    return {NFPoly(std::move(q)), rem};
}

NFPoly NFPoly::monic() const {
    if (is_zero()) return *this;
    NFElem inv = c_.back().inverse();
    std::vector<NFElem> r = c_;
    for (auto& e : r) e = e * inv;
    return NFPoly(std::move(r));
}

NFPoly NFPoly::derivative() const {
    if (c_.size() <= 1) return NFPoly();
    std::vector<NFElem> r(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Rat(static_cast<long>(i));
    return NFPoly(std::move(r));
}

NFElem NFPoly::eval(const NFElem& x) const {
    NFElem acc = x.field()->from_rat(Rat(0));
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
}

NFPoly gcd(const NFPoly& a, const NFPoly& b) {
    NFPoly r0 = a, r1 = b;
    while (!r1.is_zero()) {
        r1 = r1.monic();
        auto [q, r] = r0.divmod(r1);
        r0 = r1;
        r1 = r;
    }
    return r0.is_zero() ? r0 : r0.monic();
}

// ---------------------------------------------------------------------------
// NumberField

FieldPtr NumberField::rationals() {
    static FieldPtr q = [] {
        auto f = create_raw(QPoly::x(), RootDisk{Rat(0), Rat(0), Rat(0)});
        f->conj_theta_ = std::vector<Rat>{Rat(0)};
        return FieldPtr(f);
    }();
    return q;
}

std::shared_ptr<NumberField> NumberField::create_raw(const QPoly& mp, const RootDisk& disk) {
    std::shared_ptr<NumberField> f(new NumberField());
    f->min_poly_ = mp;
    f->root_ = disk;
    return f;
}

NFElem NumberField::theta() const {
    size_t n = static_cast<size_t>(degree());
    if (n == 1) return from_rat(-min_poly_[0]);
    std::vector<Rat> c(n, Rat(0));
    c[1] = 1;
    return NFElem(shared_from_this(), std::move(c));
}

NFElem NumberField::from_rat(const Rat& q) const {
    std::vector<Rat> c(static_cast<size_t>(degree()), Rat(0));
    c[0] = q;
    return NFElem(shared_from_this(), std::move(c));
}

NFElem NumberField::element(std::vector<Rat> coeffs) const {
    return NFElem(shared_from_this(), std::move(coeffs));
}

const std::vector<Rat>& NumberField::conj_theta() const {
    if (!conj_theta_) throw AdjoinRequired("field is not closed under complex conjugation");
    return *conj_theta_;
}

bool NumberField::knows(const NumberField* sub) const {
    if (sub == this || sub->degree() == 1) return true;
    return sub_theta_.count(sub) > 0;
}

NFElem NumberField::promote(const NFElem& x) const {
    const NumberField* xf = x.field().get();
    if (xf == this) return x;
    if (!xf || xf->degree() == 1)
        return from_rat(x.coeffs().empty() ? Rat(0) : x.coeffs()[0]);
    auto it = sub_theta_.find(xf);
    if (it == sub_theta_.end()) throw FieldMismatch("element is not of a recorded subfield");
    NFElem img(shared_from_this(), it->second);
    return eval_coeffs(x.coeffs(), img);
}

ComplexBox NumberField::theta_box(unsigned bits) const {
    std::lock_guard<std::mutex> lk(root_mutex_);
    Rat target(Int(1), Int(1) << bits);
    if (root_.rad > target) root_ = refine_disk(root_, min_poly_, target);
    return root_.box();
}

QPoly NumberField::abs_min_poly(const NFElem& e) {
    FieldPtr f = e.field() ? e.field() : rationals();
    size_t n = static_cast<size_t>(f->degree());
    if (e.is_rational()) return QPoly({-e.rat_value(), Rat(1)});
    // multiplication matrix: column i = coefficients of e * theta^i
    std::vector<std::vector<Rat>> A(n, std::vector<Rat>(n));
    std::vector<Rat> col = e.coeffs();
    for (size_t i = 0; i < n; ++i) {
        for (size_t r = 0; r < n; ++r) A[r][i] = col[r];
        if (i + 1 < n) {
            col.insert(col.begin(), Rat(0));
            col = reduce_mod(std::move(col), f->min_poly());
        }
    }
    // Faddeev-LeVerrier characteristic polynomial
    std::vector<Rat> c(n + 1);
    c[n] = 1;
    std::vector<std::vector<Rat>> M = A;
    for (size_t k = 1; k <= n; ++k) {
        Rat tr(0);
        for (size_t i = 0; i < n; ++i) tr += M[i][i];
        Rat ck = -tr / Rat(static_cast<long>(k));
        c[n - k] = ck;
        if (k == n) break;
        for (size_t i = 0; i < n; ++i) M[i][i] += ck;
        std::vector<std::vector<Rat>> Nx(n, std::vector<Rat>(n, Rat(0)));
        for (size_t i = 0; i < n; ++i)
            for (size_t l = 0; l < n; ++l) {
                if (A[i][l] == 0) continue;
                for (size_t j = 0; j < n; ++j) Nx[i][j] += A[i][l] * M[l][j];
            }
        M = std::move(Nx);
    }
    QPoly charpoly{std::move(c)};
    // the characteristic polynomial is a power of the minimal polynomial
    return squarefree_part(charpoly);
}

void NumberField::detect_conj(const std::shared_ptr<NumberField>& f) {
    if (f->conj_theta_) return;
    const QPoly& mp = f->min_poly_;
    if (mp.degree() == 1) {
        f->conj_theta_ = std::vector<Rat>{-mp[0]};
        return;
    }
    auto disks = isolate_roots(mp);
    FieldPtr fp = f;
    size_t it = which_root(mp, disks, [&](unsigned b) { return f->theta_box(b); });
    size_t ic = which_root(mp, disks, [&](unsigned b) { return f->theta_box(b).conj(); });
    NFElem th = fp->theta();
    std::vector<NFElem> cands;
    if (it == ic) {
        f->conj_theta_ = th.coeffs();
        return;
    }
    cands.push_back(-th);
    if (mp[0] != 0) {
        NFElem inv = th.inverse();
        cands.push_back(inv);
        cands.push_back(-inv);
    }
    for (const NFElem& cand : cands) {
        if (!eval_qpoly(mp, cand).is_zero()) continue;
        size_t j = which_root(mp, disks, [&](unsigned b) { return cand.embed(b); });
        if (j != ic) continue;
        // involution check: applying the map twice returns theta
        if (eval_coeffs(cand.coeffs(), cand) != th) continue;
        f->conj_theta_ = cand.coeffs();
        return;
    }
}

FieldPtr NumberField::create(const QPoly& min_poly, const ComplexBox& approx_root) {
    if (min_poly.degree() < 1) throw Error("minimal polynomial must be non-constant");
    if (min_poly.lc() != 1) throw RejectReducible("minimal polynomial must be monic");
    for (const Rat& q : min_poly.coeffs())
        if (q.get_den() != 1) throw RejectReducible("minimal polynomial must have integer coefficients");
    if (!is_irreducible(min_poly)) throw RejectReducible("polynomial is reducible over the rationals");
    auto disks = isolate_roots(min_poly);
    size_t idx = select_root(min_poly, disks, approx_root);
    auto f = create_raw(min_poly, disks[idx]);
    detect_conj(f);
    return f;
}

NumberField::AdjoinResult NumberField::adjoin_root(const FieldPtr& base_in, const QPoly& h,
                                                   const ComplexBox& approx_root) {
    FieldPtr base = base_in ? base_in : rationals();
    if (h.degree() < 1) throw ExtensionFailure("cannot adjoin a root of a constant");
    QPoly hs = primitive_integer(squarefree_part(h));
    auto disks_h = isolate_roots(hs);
    size_t ih_all = select_root(hs, disks_h, approx_root);
    QPoly h0 = primitive_integer(min_poly_factor_at(hs, disks_h, ih_all));
    if (h0.lc() < 0) h0 = -h0;
    if (h0.degree() == 1) {
        // rational root
        Rat r = -h0[0] / h0[1];
        return {base, base->from_rat(r), false};
    }
    auto disks_h0 = isolate_roots(h0);
    size_t ih = which_root(h0, disks_h0, [&](unsigned b) {
        RootDisk d = disks_h[ih_all];
        Rat target(Int(1), Int(1) << b);
        d = refine_disk(d, hs, target);
        disks_h[ih_all] = d;
        return d.box();
    });

    const QPoly& M = base->min_poly();
    int n = M.degree(), m = h0.degree();
    auto disks_M = isolate_roots(M);
    size_t itheta = which_root(M, disks_M, [&](unsigned b) { return base->theta_box(b); });

    std::vector<long> kvals;
    for (long a = 1; a <= 12; ++a) {
        kvals.push_back(a);
        kvals.push_back(-a);
    }
    for (long k : kvals) {
        try {
            // certified enclosures for all eta_j + k * theta_i
            std::vector<RootDisk> dM = disks_M, dh = disks_h0;
            Rat ka(k);
            Rat kab = k < 0 ? Rat(-k) : Rat(k);
            auto sum_disks = [&]() {
                std::vector<RootDisk> s;
                s.reserve(static_cast<size_t>(n * m));
                for (int j = 0; j < m; ++j)
                    for (int i = 0; i < n; ++i)
                        s.push_back({dh[static_cast<size_t>(j)].re + ka * dM[static_cast<size_t>(i)].re,
                                     dh[static_cast<size_t>(j)].im + ka * dM[static_cast<size_t>(i)].im,
                                     dh[static_cast<size_t>(j)].rad + kab * dM[static_cast<size_t>(i)].rad});
                return s;
            };
            std::vector<RootDisk> sums;
            bool separated = false;
            Rat floor_rad(Int(1), Int(1) << 320);
            while (true) {
                sums = sum_disks();
                separated = true;
                for (size_t a = 0; a < sums.size() && separated; ++a)
                    for (size_t b = a + 1; b < sums.size() && separated; ++b)
                        if (!sums[a].disjoint(sums[b])) separated = false;
                if (separated) break;
                Rat worst(0);
                for (auto& d : dM)
                    if (d.rad > worst) worst = d.rad;
                for (auto& d : dh)
                    if (d.rad > worst) worst = d.rad;
                if (worst < floor_rad) break;  // some sums coincide: bad k
                for (auto& d : dM) d = refine_disk(d, M, d.rad / 256);
                for (auto& d : dh) d = refine_disk(d, h0, d.rad / 256);
            }
            if (!separated) continue;
            size_t target = static_cast<size_t>(ih) * static_cast<size_t>(n) + itheta;

            // p(x) = Res_y(M(y), h0(x - k y)), roots are exactly the sums.
            // Coefficient of y^t in h0(x - k y) is
            // sum_j h0[j] * C(j,t) * (-k)^t * x^(j-t).
            std::vector<QPoly> by(static_cast<size_t>(m) + 1);
            Rat kpow(1);
            for (int t = 0; t <= m; ++t) {
                std::vector<Rat> xc(static_cast<size_t>(m - t) + 1, Rat(0));
                for (int j = t; j <= m; ++j) {
                    Int bc;
                    mpz_bin_uiui(bc.get_mpz_t(), static_cast<unsigned long>(j),
                                 static_cast<unsigned long>(t));
                    xc[static_cast<size_t>(j - t)] += h0[j] * Rat(bc) * kpow;
                }
                by[static_cast<size_t>(t)] = QPoly(std::move(xc));
                kpow *= -ka;
            }
            QPoly p = resultant_y(M, by);
            if (p.degree() != n * m) continue;

            QPoly g = min_poly_factor_at(p, sums, target);
            int d = g.degree();

            // normalize to a monic integer generator: theta_new = lc(g) * theta'
            Rat a = g.lc();
            QPoly mnew = g.scale_arg(Rat(1) / a);
            Rat apow(1);
            for (int t = 0; t < d - 1; ++t) apow *= a;
            mnew = mnew * apow;
            RootDisk nd{sums[target].re * a, sums[target].im * a, sums[target].rad * a};
            auto N = create_raw(mnew, nd);
            FieldPtr Np = N;
            NFElem theta_new = Np->theta();
            NFElem theta_prime = theta_new / a;

            // recover the base generator inside N via a linear gcd
            NFPoly MN = NFPoly::from_qpoly(M, Np);
            NFPoly t_lin(std::vector<NFElem>{theta_prime, Np->from_rat(Rat(-k))});
            NFPoly B;
            {
                NFPoly acc;
                for (int j = m; j >= 0; --j) {
                    acc = acc * t_lin +
                          NFPoly(std::vector<NFElem>{Np->from_rat(h0[j])});
                }
                B = acc;
            }
            NFPoly G = gcd(MN, B);
            if (G.degree() != 1) continue;
            NFElem theta_img = -G[0];
            if (which_root(M, dM, [&](unsigned b) { return theta_img.embed(b); }) != itheta)
                continue;
            NFElem eta_img = theta_prime - theta_img * Rat(k);
            if (!eval_qpoly(h0, eta_img).is_zero()) continue;
            if (which_root(h0, dh, [&](unsigned b) { return eta_img.embed(b); }) != ih)
                continue;

            if (d == n) {
                // the root already lies in the base field
                std::vector<std::vector<Rat>> V(static_cast<size_t>(n),
                                                std::vector<Rat>(static_cast<size_t>(n)));
                NFElem pw = Np->from_rat(Rat(1));
                for (int i = 0; i < n; ++i) {
                    for (int r = 0; r < n; ++r)
                        V[static_cast<size_t>(r)][static_cast<size_t>(i)] =
                            pw.coeffs()[static_cast<size_t>(r)];
                    if (i + 1 < n) pw = pw * theta_img;
                }
                std::vector<Rat> sol = solve_linear(std::move(V), eta_img.coeffs());
                NFElem eta_base(base, std::move(sol));
                if (!eval_qpoly(h0, eta_base).is_zero())
                    throw ExtensionFailure("subfield expression failed verification");
                return {base, eta_base, false};
            }

            // record the tower
            N->sub_theta_[base.get()] = theta_img.coeffs();
            for (const auto& [anc, vec] : base->sub_theta_)
                N->sub_theta_[anc] = eval_coeffs(vec, theta_img).coeffs();
            N->parents_.push_back(base);

            // conjugation, when it propagates through the extension
            if (base->has_conj()) {
                NFElem conj_tb = eval_coeffs(base->conj_theta(), theta_img);
                std::vector<NFElem> cands = {eta_img, -eta_img, theta_img, -theta_img, conj_tb};
                if (!eta_img.is_zero()) {
                    cands.push_back(eta_img.inverse());
                    cands.push_back(-eta_img.inverse());
                }
                size_t ihc = which_root(h0, dh, [&](unsigned b) { return eta_img.embed(b).conj(); });
                for (const NFElem& cand : cands) {
                    if (!eval_qpoly(h0, cand).is_zero()) continue;
                    if (which_root(h0, dh, [&](unsigned b) { return cand.embed(b); }) != ihc)
                        continue;
                    NFElem ct = (cand + conj_tb * Rat(k)) * a;
                    if (!eval_qpoly(mnew, ct).is_zero()) continue;
                    if (eval_coeffs(ct.coeffs(), ct) != theta_new) continue;
                    N->conj_theta_ = ct.coeffs();
                    break;
                }
            }
            if (!N->conj_theta_) detect_conj(N);

            return {Np, eta_img, true};
        } catch (const PrecisionExhausted&) {
            continue;
        }
    }
    throw ExtensionFailure("no primitive element multiplier succeeded");
}

NumberField::AdjoinResult NumberField::adjoin_sqrt(const FieldPtr& base_in, const NFElem& e,
                                                   std::optional<ComplexBox> approx) {
    FieldPtr base = base_in ? base_in : rationals();
    if (e.is_zero()) return {base, base->from_rat(Rat(0)), false};
    QPoly me = abs_min_poly(e);
    QPoly g = me.compose_square();
    ComplexBox ap(Rat(0), Rat(0));
    if (approx) {
        ap = *approx;
    } else {
        ComplexBox eb = e.embed(96);
        std::complex<double> w =
            std::sqrt(std::complex<double>(eb.re.mid().get_d(), eb.im.mid().get_d()));
        double slack = std::max(1e-12, std::abs(w) * 1e-9);
        ap = ComplexBox(RatInterval(Rat(w.real() - slack), Rat(w.real() + slack)),
                        RatInterval(Rat(w.imag() - slack), Rat(w.imag() + slack)));
    }
    for (int attempt = 0; attempt < 2; ++attempt) {
        AdjoinResult r = adjoin_root(base, g, ap);
        NFElem ep = r.field->promote(e.field() ? e : rationals()->from_rat(Rat(0)));
        if (r.element * r.element == ep) return r;
        // wrong branch of a nearby conjugate: flip the sign of the target
        ap = ComplexBox(RatInterval(-ap.re.hi, -ap.re.lo), RatInterval(-ap.im.hi, -ap.im.lo));
    }
    throw ExtensionFailure("square root adjunction failed verification");
}

FieldPtr NumberField::conj_closure(const FieldPtr& fin) {
    FieldPtr f = fin ? fin : rationals();
    for (int round = 0; round < 3; ++round) {
        if (f->has_conj()) return f;
        ComplexBox cb = f->theta_box(128).conj();
        AdjoinResult r = adjoin_root(f, f->min_poly(), cb);
        if (!r.extended && !f->has_conj()) {
            // the conjugate root lies in the field but eluded the cheap
            // candidate scan at construction: record it, after checking the
            // map really is an involution
            const NFElem& c = r.element;
            NFElem th = f->theta();
            if (eval_coeffs(c.coeffs(), c) == th)
                const_cast<NumberField*>(f.get())->conj_theta_ = c.coeffs();
            else
                throw ExtensionFailure("conjugate root map is not an involution");
        }
        f = r.field;
    }
    if (f->has_conj()) return f;
    throw ExtensionFailure("conjugation closure did not stabilize");
}

}  // namespace crford
