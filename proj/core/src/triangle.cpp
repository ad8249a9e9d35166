#include "crford/triangle.hpp"

#include <string>
#include <utility>

namespace crford {
namespace {

// Laurent polynomial in phi over a fixed field; c[i] is the coefficient of
// phi^(low+i).  Used to eliminate phi from trace(I2 I3 I1 I3) symbolically,
// with conj(phi) = 1/phi since |phi| = 1.
struct Laurent {
    int low = 0;
    std::vector<NFElem> c;
};

Laurent lp_trim(Laurent a) {
    size_t lo = 0;
    while (lo < a.c.size() && a.c[lo].is_zero()) ++lo;
    size_t hi = a.c.size();
    while (hi > lo && a.c[hi - 1].is_zero()) --hi;
    Laurent out;
    out.low = a.low + static_cast<int>(lo);
    out.c.assign(a.c.begin() + lo, a.c.begin() + hi);
    if (out.c.empty()) out.low = 0;
    return out;
}

Laurent lp_const(NFElem v) { return lp_trim({0, {std::move(v)}}); }

Laurent lp_add(const Laurent& a, const Laurent& b, const FieldPtr& f) {
    if (a.c.empty()) return b;
    if (b.c.empty()) return a;
    int lo = std::min(a.low, b.low);
    int hi = std::max(a.low + static_cast<int>(a.c.size()), b.low + static_cast<int>(b.c.size()));
    Laurent out{lo, std::vector<NFElem>(hi - lo, f->from_rat(Rat(0)))};
    for (size_t i = 0; i < a.c.size(); ++i) out.c[a.low - lo + i] = out.c[a.low - lo + i] + a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) out.c[b.low - lo + i] = out.c[b.low - lo + i] + b.c[i];
    return lp_trim(out);
}

Laurent lp_mul(const Laurent& a, const Laurent& b, const FieldPtr& f) {
    if (a.c.empty() || b.c.empty()) return {};
    Laurent out{a.low + b.low,
                std::vector<NFElem>(a.c.size() + b.c.size() - 1, f->from_rat(Rat(0)))};
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) out.c[i + j] = out.c[i + j] + a.c[i] * b.c[j];
    return lp_trim(out);
}

Laurent lp_neg(const Laurent& a) {
    Laurent out = a;
    for (auto& v : out.c) v = -v;
    return out;
}

NFElem lp_coeff(const Laurent& a, int k, const FieldPtr& f) {
    int i = k - a.low;
    if (i < 0 || i >= static_cast<int>(a.c.size())) return f->from_rat(Rat(0));
    return a.c[i];
}

using LMat = std::array<Laurent, 9>;

LMat lmat_mul(const LMat& a, const LMat& b, const FieldPtr& f) {
    LMat out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Laurent s;
            for (int k = 0; k < 3; ++k) s = lp_add(s, lp_mul(a[i * 3 + k], b[k * 3 + j], f), f);
            out[i * 3 + j] = s;
        }
    return out;
}

// Reflections over the symbolic form, same entry rule as reflection_generators.
std::array<LMat, 3> symbolic_reflections(const LMat& h, const FieldPtr& f) {
    std::array<LMat, 3> gens;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Laurent v;
                if (i == k) v = lp_mul(lp_const(f->from_rat(Rat(2))), h[k * 3 + j], f);
                if (i == j) v = lp_add(v, lp_const(f->from_rat(Rat(-1))), f);
                gens[k][i * 3 + j] = v;
            }
    return gens;
}

Mat lower_unipotent_target(const FieldPtr& f) {
    NFElem one = f->from_rat(Rat(1)), zero = f->from_rat(Rat(0));
    return Mat::from_rows({{one, zero, zero},
                           {one, one, zero},
                           {f->from_rat(Rat(-1, 2)), -one, one}});
}

Mat antidiagonal_form(const FieldPtr& f) {
    NFElem one = f->from_rat(Rat(1)), zero = f->from_rat(Rat(0));
    return Mat::from_rows({{zero, zero, one}, {zero, one, zero}, {one, zero, zero}});
}

// Particular solution of m x = b (possibly singular); free variables are 0.
std::vector<NFElem> solve_particular(const Mat& m, std::vector<NFElem> b) {
    size_t n = m.dim();
    FieldPtr f = m.field();
    std::vector<std::vector<NFElem>> a(n, std::vector<NFElem>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) a[i][j] = m.at(i, j);
    std::vector<size_t> pivots;
    size_t row = 0;
    for (size_t col = 0; col < n && row < n; ++col) {
        size_t sel = row;
        while (sel < n && a[sel][col].is_zero()) ++sel;
        if (sel == n) continue;
        std::swap(a[sel], a[row]);
        std::swap(b[sel], b[row]);
        NFElem inv = a[row][col].inverse();
        for (size_t j = col; j < n; ++j) a[row][j] = a[row][j] * inv;
        b[row] = b[row] * inv;
        for (size_t r = 0; r < n; ++r) {
            if (r == row || a[r][col].is_zero()) continue;
            NFElem factor = a[r][col];
            for (size_t j = col; j < n; ++j) a[r][j] = a[r][j] - factor * a[row][j];
            b[r] = b[r] - factor * b[row];
        }
        pivots.push_back(col);
        ++row;
    }
    for (size_t r = row; r < n; ++r)
        if (!b[r].is_zero()) throw ExtensionFailure("inconsistent linear system");
    std::vector<NFElem> x(n, f->from_rat(Rat(0)));
    for (size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = b[i];
    return x;
}

std::vector<NFElem> vec_scale(const std::vector<NFElem>& v, const NFElem& s) {
    std::vector<NFElem> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(e * s);
    return out;
}

std::vector<NFElem> vec_add(const std::vector<NFElem>& u, const std::vector<NFElem>& v) {
    std::vector<NFElem> out;
    out.reserve(u.size());
    for (size_t i = 0; i < u.size(); ++i) out.push_back(u[i] + v[i]);
    return out;
}

StandardizedGroup assemble(const TriangleGroup& g, const FieldPtr& f, const Mat& q,
                           bool closed_form) {
    Mat qi = q.inverse();
    Mat i1 = qi * g.I1.promoted(f) * q;
    Mat i2 = qi * g.I2.promoted(f) * q;
    Mat i3 = qi * g.I3.promoted(f) * q;
    TriangleParams tp{g.params.p, g.params.q, g.params.r, f->promote(g.params.phi),
                      g.params.conjugate_branch};
    TriangleGroup out{std::move(tp), HermitianForm(antidiagonal_form(f)), std::move(i1),
                      std::move(i2), std::move(i3), f};
    return {q, std::move(out), closed_form};
}

// The tabulated change of basis for the (3,3,5) group with parabolic phi.
// Validated exactly before use; callers fall back to the general construction
// when validation fails.
std::optional<StandardizedGroup> closed_form_standardization(const TriangleGroup& g,
                                                             const Mat& a) {
    const FieldPtr& f0 = g.field;
    NFElem ph = f0->promote(g.params.phi);
    // sqrt5 = phi + 1/phi + 2 and i*s = 2 phi - sqrt5 + 2, s = sqrt(4 sqrt5 - 5)
    NFElem s5 = ph + ph.inverse() + Rat(2);
    if (!(s5 * s5 - Rat(5)).is_zero()) return std::nullopt;
    NFElem is = ph * Rat(2) - s5 + Rat(2);
    if (!(is * is + s5 * Rat(4) - Rat(5)).is_zero()) return std::nullopt;
    auto rt = NumberField::adjoin_sqrt(f0, f0->from_rat(Rat(2)));
    FieldPtr f = NumberField::conj_closure(rt.field);
    NFElem rt2 = f->promote(rt.element);
    NFElem s5p = f->promote(s5), isp = f->promote(is);
    NFElem one = f->from_rat(Rat(1)), zero = f->from_rat(Rat(0));
    NFElem den = rt2 * Rat(4);
    NFElem q11 = rt2 + (one * Rat(3) - s5p) * (isp - Rat(5)) / den;
    NFElem q13 = -rt2 + (s5p + Rat(1)) * (one - isp) / den;
    NFElem q21 = (one * Rat(2) + (one * Rat(2) - s5p) * (isp - Rat(3))) / den;
    NFElem q22 = rt2 * Rat(1, 2);
    NFElem q23 = -rt2;
    NFElem q31 = (one - s5p) * (isp - Rat(1)) / den;
    NFElem q33 = -rt2 + (s5p + Rat(1)) * (isp - Rat(1)) / den;
    Mat q = Mat::from_rows({{q11, zero, q13}, {q21, q22, q23}, {q31, zero, q33}});
    Mat hp = g.H.h.promoted(f);
    // Accept the tabulated Q up to a positive rational scale on the form
    // (the (1,1) entry of Q*HQ pins it down) and rescale exactly.
    Mat pulled = q.conj_transpose() * hp * q;
    NFElem scale = pulled.at(1, 1);
    if (!scale.is_rational() || sgn(scale.rat_value()) <= 0) return std::nullopt;
    if (pulled != antidiagonal_form(f) * scale) return std::nullopt;
    if (!(scale - Rat(1)).is_zero()) {
        auto corr = NumberField::adjoin_sqrt(f, f->from_rat(Rat(1) / scale.rat_value()));
        f = NumberField::conj_closure(corr.field);
        q = q.promoted(f) * f->promote(corr.element);
    }
    if (q.conj_transpose() * g.H.h.promoted(f) * q != antidiagonal_form(f)) return std::nullopt;
    if (q.inverse() * a.promoted(f) * q != lower_unipotent_target(f)) return std::nullopt;
    return assemble(g, f, q, true);
}

}  // namespace

NFElem cos_pi_over(int n, FieldPtr& field) {
    switch (n) {
        case 2:
            return field->from_rat(Rat(0));
        case 3:
            return field->from_rat(Rat(1, 2));
        case 4: {
            auto r = NumberField::adjoin_sqrt(field, field->from_rat(Rat(2)));
            field = r.field;
            return r.element * Rat(1, 2);
        }
        case 5: {
            auto r = NumberField::adjoin_sqrt(field, field->from_rat(Rat(5)));
            field = r.field;
            return (r.element + Rat(1)) * Rat(1, 4);
        }
        case 6: {
            auto r = NumberField::adjoin_sqrt(field, field->from_rat(Rat(3)));
            field = r.field;
            return r.element * Rat(1, 2);
        }
        default:
            throw ExtensionFailure("cos(pi/" + std::to_string(n) + ") outside the supported table");
    }
}

HermitianForm triangle_form(int p, int q, int r, const NFElem& phi) {
    if (!phi.field()) throw ExtensionFailure("phi has no field");
    FieldPtr f = phi.field();
    if (!f->has_conj()) f = NumberField::conj_closure(f);
    NFElem cp = cos_pi_over(p, f);
    NFElem cq = cos_pi_over(q, f);
    NFElem cr = cos_pi_over(r, f);
    if (!f->has_conj()) f = NumberField::conj_closure(f);
    NFElem ph = f->promote(phi);
    cp = f->promote(cp);
    cq = f->promote(cq);
    cr = f->promote(cr);
    if (!(ph * ph.conj() - Rat(1)).is_zero())
        throw DegenerateForm("phi must satisfy phi * conj(phi) = 1");
    NFElem one = f->from_rat(Rat(1));
    return HermitianForm(Mat::from_rows({{one, -cp, -(cr * ph)},
                                         {-cp, one, -cq},
                                         {-(cr * ph.conj()), -cq, one}}));
}

Admissibility admissibility(const TriangleParams& tp) {
    HermitianForm h = triangle_form(tp.p, tp.q, tp.r, tp.phi);
    int s = h.h.det().sign();
    if (s < 0) return Admissibility::Admissible;
    return s == 0 ? Admissibility::Boundary : Admissibility::Inadmissible;
}

std::array<Mat, 3> reflection_generators(const HermitianForm& h) {
    const FieldPtr& f = h.h.field();
    std::array<Mat, 3> gens{Mat(3, f), Mat(3, f), Mat(3, f)};
    for (size_t k = 0; k < 3; ++k)
        for (size_t i = 0; i < 3; ++i)
            for (size_t j = 0; j < 3; ++j) {
                NFElem v = f->from_rat(Rat(0));
                if (i == k) v = h.h.at(k, j) * Rat(2);
                if (i == j) v = v - Rat(1);
                gens[k].at(i, j) = v;
            }
    return gens;
}

TriangleGroup make_triangle_group(int p, int q, int r, const NFElem& phi) {
    HermitianForm h = triangle_form(p, q, r, phi);
    if (h.h.det().sign() >= 0) throw DegenerateForm("Hermitian form is not of signature (2,1)");
    auto gens = reflection_generators(h);
    FieldPtr f = h.h.field();
    TriangleParams tp{p, q, r, f->promote(phi), false};
    return {std::move(tp), std::move(h), std::move(gens[0]), std::move(gens[1]),
            std::move(gens[2]), std::move(f)};
}

TriangleParams solve_accidental_parabolic(int p, int q, int r, bool conjugate_branch) {
    // cosine field over Q (real, conjugation trivial)
    FieldPtr f = NumberField::rationals();
    NFElem cp = cos_pi_over(p, f);
    NFElem cq = cos_pi_over(q, f);
    NFElem cr = cos_pi_over(r, f);
    cp = f->promote(cp);
    cq = f->promote(cq);
    NFElem one = f->from_rat(Rat(1)), zero = f->from_rat(Rat(0));

    // symbolic Hermitian form: H13 = -cr * phi, H31 = -cr / phi
    LMat h;
    h[0] = lp_const(one);
    h[1] = lp_const(-cp);
    h[2] = lp_trim({1, {-cr}});
    h[3] = lp_const(-cp);
    h[4] = lp_const(one);
    h[5] = lp_const(-cq);
    h[6] = lp_trim({-1, {-cr}});
    h[7] = lp_const(-cq);
    h[8] = lp_const(one);
    auto gens = symbolic_reflections(h, f);
    LMat prod = lmat_mul(lmat_mul(gens[1], gens[2], f), lmat_mul(gens[0], gens[2], f), f);
    Laurent tr;
    for (int i = 0; i < 3; ++i) tr = lp_add(tr, prod[i * 3 + i], f);

    // real trace: symmetric under phi -> 1/phi, so a polynomial in
    // y = phi + 1/phi via the recursion u_j = y u_{j-1} - u_{j-2}
    int hi = tr.c.empty() ? 0 : tr.low + static_cast<int>(tr.c.size()) - 1;
    for (int j = 1; j <= hi; ++j)
        if (lp_coeff(tr, j, f) != lp_coeff(tr, -j, f))
            throw NoAccidentalParabolic("trace is not symmetric in phi");
    NFPoly y({zero, one});
    NFPoly u_prev({f->from_rat(Rat(2))});  // phi^0 + phi^-0 counted twice
    NFPoly u_cur = y;
    NFPoly poly({lp_coeff(tr, 0, f) - Rat(3)});
    for (int j = 1; j <= hi; ++j) {
        poly = poly + NFPoly({lp_coeff(tr, j, f)}) * u_cur;
        NFPoly u_next = y * u_cur - u_prev;
        u_prev = u_cur;
        u_cur = u_next;
    }
    if (poly.is_zero()) throw NoAccidentalParabolic("trace is identically 3");

    InFieldRoots sols = roots_in_field(poly, f);
    std::vector<std::pair<FieldPtr, NFElem>> candidates;
    for (const auto& y0 : sols.roots) candidates.emplace_back(f, y0);
    for (const QPoly& mp : sols.missing) {
        for (const RootDisk& d0 : isolate_roots(mp)) {
            RootDisk d = d0;
            std::optional<ComplexBox> real_box;
            for (int it = 0; it < 128; ++it) {
                if (d.im - d.rad > 0 || d.im + d.rad < 0) break;  // complex root
                Rat a = d.re - d.rad, b = d.re + d.rad;
                if (sgn(mp.eval(a)) * sgn(mp.eval(b)) < 0) {
                    real_box = ComplexBox(RatInterval(a, b), RatInterval(Rat(0), Rat(0)));
                    break;
                }
                d = refine_disk(d, mp, d.rad / 2);
            }
            if (!real_box) continue;
            if (d.re + d.rad < -2 || d.re - d.rad > 2) continue;
            auto adj = NumberField::adjoin_root(f, mp, *real_box);
            candidates.emplace_back(adj.field, adj.element);
        }
    }

    for (const auto& [fy, y0] : candidates) {
        if ((y0 + Rat(2)).sign() <= 0 || (y0 - Rat(2)).sign() >= 0) continue;
        auto sq = NumberField::adjoin_sqrt(fy, y0 * y0 - Rat(4));  // Im > 0 branch
        FieldPtr fp = NumberField::conj_closure(sq.field);
        NFElem root = fp->promote(sq.element);
        if (conjugate_branch) root = -root;
        NFElem phi = (fp->promote(y0) + root) * Rat(1, 2);
        TriangleParams tp{p, q, r, phi, conjugate_branch};
        if (admissibility(tp) != Admissibility::Admissible) continue;
        TriangleGroup g = make_triangle_group(p, q, r, phi);
        Mat a = g.I2 * g.I3 * g.I1 * g.I3;
        if (!(a.trace() - Rat(3)).is_zero()) continue;
        tp.phi = g.params.phi;
        return tp;
    }
    throw NoAccidentalParabolic("no admissible solution of trace = 3 for (" + std::to_string(p) +
                                "," + std::to_string(q) + "," + std::to_string(r) + ")");
}

StandardizedGroup conjugate_to_standard(const TriangleGroup& g) {
    Mat a = g.I2 * g.I3 * g.I1 * g.I3;
    if (!is_unipotent(a)) throw NotParabolic("I2 I3 I1 I3 is not unipotent");

    if (g.params.p == 3 && g.params.q == 3 && g.params.r == 5) {
        try {
            if (auto std_form = closed_form_standardization(g, a)) return *std_form;
        } catch (const Error&) {
            // fall through to the general construction
        }
    }

    // Build Q columnwise from the invariant flag of a: q3 spans ker(a - 1),
    // (a-1) q2 = -q3, (a-1) q1 = q2 - q3/2, then correct the inner products
    // and scale so that Q* H Q = J.
    const FieldPtr& f0 = g.field;
    Mat n = a - Mat::identity(3, f0);
    auto kernel = null_space(n);
    if (kernel.size() != 1) throw NotParabolic("fixed space of a is not one dimensional");
    std::vector<NFElem> v3 = kernel[0];
    std::vector<NFElem> v2 = solve_particular(n, vec_scale(v3, f0->from_rat(Rat(-1))));
    std::vector<NFElem> v1 =
        solve_particular(n, vec_add(v2, vec_scale(v3, f0->from_rat(Rat(-1, 2)))));

    NFElem k = g.H.inner(v2, v2);
    if (k.is_zero()) throw ExtensionFailure("degenerate middle vector");
    // <v1,v2> is purely imaginary; shift v2 along v3 (and v1 along v2 to keep
    // the flag relations) to cancel it, then kill <v1,v1> with a real shift.
    NFElem cross = g.H.inner(v1, v2);
    NFElem t = cross / (k * Rat(2));
    v2 = vec_add(v2, vec_scale(v3, t));
    v1 = vec_add(v1, vec_scale(v2, -t));
    if (!g.H.inner(v1, v2).is_zero()) throw ExtensionFailure("cross term not cancelled");
    NFElem norm1 = g.H.inner(v1, v1);
    NFElem s = -(norm1 / (k * Rat(2)));
    v1 = vec_add(v1, vec_scale(v3, s));
    if (!g.H.inner(v1, v1).is_zero()) throw ExtensionFailure("null condition not met");
    if (k.sign() <= 0) throw ExtensionFailure("middle vector has nonpositive norm");

    auto rt = NumberField::adjoin_sqrt(f0, k);
    FieldPtr f = NumberField::conj_closure(rt.field);
    NFElem rho = f->promote(rt.element).inverse();
    Mat q(3, f);
    for (size_t i = 0; i < 3; ++i) {
        q.at(i, 0) = f->promote(v1[i]) * rho;
        q.at(i, 1) = f->promote(v2[i]) * rho;
        q.at(i, 2) = f->promote(v3[i]) * rho;
    }
    if (q.conj_transpose() * g.H.h.promoted(f) * q != antidiagonal_form(f))
        throw ExtensionFailure("change of basis does not carry H to J");
    if (q.inverse() * a.promoted(f) * q != lower_unipotent_target(f))
        throw ExtensionFailure("conjugated a is not the standard unipotent");
    return assemble(g, f, q, false);
}

}  // namespace crford
