#include "crford/realford.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace crford {

namespace {

NFElem abs_sq(const NFElem& e) { return e * e.conj(); }

// Outward rounding of interval endpoints to dyadics with small numerators,
// so interval arithmetic stays cheap when the exact data underneath has huge
// coefficients.  Enclosure is preserved.
Rat dyadic_floor(const Rat& q, unsigned bits) {
    Int num = q.get_num() << bits;
    Int quo;
    mpz_fdiv_q(quo.get_mpz_t(), num.get_mpz_t(), q.get_den().get_mpz_t());
    Rat out(quo, Int(1) << bits);
    out.canonicalize();
    return out;
}

RatInterval round_iv(const RatInterval& v) {
    return {dyadic_floor(v.lo, 80), -dyadic_floor(-v.hi, 80)};
}

ComplexBox round_box(const ComplexBox& b) { return {round_iv(b.re), round_iv(b.im)}; }

// 2x2 matrix of boxes, row major; a certified enclosure of a word's entries
// maintained alongside the exact product.
using BoxMat = std::array<ComplexBox, 4>;

BoxMat box_mul(const BoxMat& a, const BoxMat& b) {
    return {round_box(a[0] * b[0] + a[1] * b[2]), round_box(a[0] * b[1] + a[1] * b[3]),
            round_box(a[2] * b[0] + a[3] * b[2]), round_box(a[2] * b[1] + a[3] * b[3])};
}

BoxMat box_of(const Mat& m, long bits) {
    return {round_box(m.at(0, 0).embed(bits)), round_box(m.at(0, 1).embed(bits)),
            round_box(m.at(1, 0).embed(bits)), round_box(m.at(1, 1).embed(bits))};
}

ComplexBox approx_box(double re, double im) {
    Rat r(re), i(im), w(1, 1000);
    return {RatInterval(r - w, r + w), RatInterval(i - w, i + w)};
}

double mid(const RatInterval& iv) { return iv.mid().get_d(); }

// Translation amount of an upper triangular parabolic [[e, b], [0, e]],
// e = +-1, acting as z -> z + b*e.
NFElem translation_amount(const Mat& a) {
    if (!a.at(1, 0).is_zero()) throw NotParabolic("matrix does not fix infinity");
    NFElem e = a.at(0, 0);
    if (!(e * e - Rat(1)).is_zero()) throw NotParabolic("diagonal is not a sign");
    return a.at(0, 1) * e;
}

}  // namespace

IsometricSphere isometric_sphere(const Mat& g) {
    if (g.dim() != 2) throw Error("isometric_sphere: need a 2x2 matrix");
    const NFElem& c = g.at(1, 0);
    if (c.is_zero()) throw FixesInfinity("map fixes infinity, no isometric sphere");
    NFElem ic = abs_sq(c).inverse();
    return {g, -g.at(1, 1) * c.conj() * ic, ic};
}

H3Point extend_to_h3(const Mat& g, const H3Point& p) {
    const NFElem &a = g.at(0, 0), &b = g.at(0, 1), &c = g.at(1, 0), &d = g.at(1, 1);
    NFElem num = (a * p.z + b) * (c * p.z + d).conj() + a * c.conj() * p.t2;
    NFElem den = abs_sq(c * p.z + d) + abs_sq(c) * p.t2;
    return {num / den, p.t2 / (den * den)};
}

bool on_sphere(const IsometricSphere& s, const H3Point& p) {
    return (abs_sq(p.z - s.center) + p.t2 - s.radius_sq).is_zero();
}

NFElem cusp_shape(const Mat& p1, const Mat& p2) {
    if (classify_psl2(p1) != Psl2Class::Parabolic ||
        classify_psl2(p2) != Psl2Class::Parabolic)
        throw NotParabolic("cusp_shape needs two parabolic maps");
    auto f1 = fixed_points_psl2(p1), f2 = fixed_points_psl2(p2);
    if (f1.size() != 1 || f2.size() != 1 || f1[0].infinite != f2[0].infinite)
        throw NoCommonFixedPoint("peripheral maps fix different points");
    Mat a1 = p1, a2 = p2;
    if (!f1[0].infinite) {
        NFElem z0 = f1[0].z;
        if (!(f2[0].z - z0).is_zero())
            throw NoCommonFixedPoint("peripheral maps fix different points");
        FieldPtr f = z0.field();
        NFElem one = f->from_rat(Rat(1)), zero = f->from_rat(Rat(0));
        Mat w = Mat::from_rows({{zero, -one}, {one, -z0}});
        Mat wi = w.inverse();
        a1 = w * p1 * wi;
        a2 = w * p2 * wi;
    }
    // Ratio of the corner entries of the given SL2 lifts.  This equals the
    // translation ratio up to the product of the two diagonal signs, and
    // matches the classical corner-entry reading for these census groups.
    if (!a1.at(1, 0).is_zero() || !a2.at(1, 0).is_zero())
        throw NotParabolic("normalization failed");
    if (a1.at(0, 1).is_zero()) throw NotParabolic("first map acts trivially");
    return a2.at(0, 1) / a1.at(0, 1);
}

namespace {

// SL2 lifts of the same PSL2 element differ by sign only, so normalizing the
// first nonzero coefficient to be positive gives an exact projective key
// without any field division.
std::string sign_key(const Mat& m) {
    int sgn = 0;
    for (size_t r = 0; r < 2 && sgn == 0; ++r)
        for (size_t c = 0; c < 2 && sgn == 0; ++c)
            for (const Rat& q : m.at(r, c).coeffs())
                if (q != 0) {
                    sgn = q > 0 ? 1 : -1;
                    break;
                }
    std::ostringstream out;
    for (size_t r = 0; r < 2; ++r)
        for (size_t c = 0; c < 2; ++c) {
            for (const Rat& q : m.at(r, c).coeffs())
                out << (sgn < 0 ? Rat(-q) : q).get_str() << ",";
            out << ";";
        }
    return out.str();
}

// Words in gens and their inverses, reduced, breadth first.  visit returns
// true to stop the search.
template <typename F>
void word_search(const std::vector<Mat>& gens, int max_len, F visit) {
    size_t n = gens.size();
    std::vector<Mat> letters;
    for (const auto& g : gens) {
        letters.push_back(g);
        letters.push_back(g.inverse());
    }
    struct Node {
        Mat m;
        int last;  // letter index, -1 for the empty word
        int len;
    };
    std::deque<Node> queue;
    std::set<std::string> seen;
    Mat id = Mat::identity(2, gens[0].field());
    queue.push_back({id, -1, 0});
    seen.insert(sign_key(id));
    if (visit(id)) return;
    while (!queue.empty()) {
        Node node = queue.front();
        queue.pop_front();
        if (node.len == max_len) continue;
        for (size_t li = 0; li < 2 * n; ++li) {
            if (node.last >= 0 && (static_cast<size_t>(node.last) ^ 1) == li) continue;
            Mat next = node.m * letters[li];
            std::string key = sign_key(next);
            if (!seen.insert(key).second) continue;
            if (visit(next)) return;
            queue.push_back({next, static_cast<int>(li), node.len + 1});
        }
    }
}

// Group element sending the finite point z0 to infinity, found by search.
Mat element_to_infinity(const std::vector<Mat>& gens, const NFElem& z0) {
    Mat found = Mat::identity(2, gens[0].field());
    bool ok = false;
    word_search(gens, 6, [&](const Mat& m) {
        if ((m.at(1, 0) * z0 + m.at(1, 1)).is_zero()) {
            found = m;
            ok = true;
            return true;
        }
        return false;
    });
    if (!ok) throw Error("no short group element maps the cusp point to infinity");
    return found;
}

std::string elem_key(const NFElem& e) {
    std::ostringstream out;
    for (const Rat& c : e.coeffs()) out << c.get_str() << ",";
    return out.str();
}

CensusRep finish_rep(CensusRep rep) {
    const auto& per = rep.pres.peripheral.at(0);
    Mat p1 = abs_image(rep.pres_gens, per.first);
    Mat p2 = abs_image(rep.pres_gens, per.second);
    Mat h = Mat::identity(2, rep.field);
    if (!p1.at(1, 0).is_zero()) {
        auto fx = fixed_points_psl2(p1);
        if (fx.size() != 1 || fx[0].infinite) throw NotParabolic(rep.name);
        h = element_to_infinity(rep.pres_gens, fx[0].z);
    }
    Mat hi = h.inverse();
    rep.t1 = h * p1 * hi;
    rep.t2 = h * p2 * hi;
    rep.tau1 = translation_amount(rep.t1);
    rep.tau2 = translation_amount(rep.t2);
    rep.shape = cusp_shape(rep.t1, rep.t2);
    return rep;
}

CensusRep rep_m004() {
    CensusRep rep;
    rep.name = "m004";
    // alpha = (i - sqrt(3))/2, a primitive 12th root of unity.
    FieldPtr f = NumberField::create(QPoly::from_ints({1, 0, -1, 0, 1}),
                                     approx_box(-0.8660254, 0.5));
    if (!f->has_conj()) f = NumberField::conj_closure(f);
    rep.field = f;
    NFElem al = f->theta();
    NFElem one = f->from_rat(Rat(1)), zero = f->from_rat(Rat(0));
    Mat x = Mat::from_rows({{one - al * al, -al.pow(3)}, {al.pow(3), al * al * Rat(2)}});
    Mat t = Mat::from_rows({{one, al}, {zero, one}});  // xyx
    Mat y = x.inverse() * t * x.inverse();
    Mat s = Mat::from_rows({{one, zero}, {al, one}});  // x^2 y x^-1
    rep.pres = builtin_presentation("m004");
    rep.pres_gens = {x, y};
    rep.gens = {s, t};
    return finish_rep(std::move(rep));
}

CensusRep rep_m009() {
    // Q(i, beta) with beta^4 + beta^2 + 2 = 0 is not closed under complex
    // conjugation; build the closure as Q(r)(sqrt 7)(i) with r = sqrt(2*sqrt(2)-1),
    // where beta = r/2 + i*sqrt(7)/(2r).
    FieldPtr f1 = NumberField::create(QPoly::from_ints({-7, 0, 2, 0, 1}),
                                      approx_box(1.3521937, 0.0));
    auto a7 = NumberField::adjoin_sqrt(f1, f1->from_rat(Rat(7)));
    auto ai = NumberField::adjoin_sqrt(a7.field, a7.field->from_rat(Rat(-1)));
    FieldPtr f = ai.field;
    if (!f->has_conj()) f = NumberField::conj_closure(f);
    NFElem i = f->promote(ai.element);
    NFElem s7 = f->promote(a7.element);
    NFElem r = f->promote(f1->theta());
    NFElem beta = r / Rat(2) + i * s7 / (r * Rat(2));
    if (!(beta.pow(4) + beta * beta + Rat(2)).is_zero())
        throw Error("m009: wrong branch for beta");
    NFElem one = f->from_rat(Rat(1)), zero = f->from_rat(Rat(0));
    Mat x = Mat::from_rows({{-beta.pow(3) - beta, i}, {-i, beta}});
    Mat y = Mat::from_rows({{-beta.pow(3), i}, {-i * (beta * beta + Rat(1)), beta}});
    // q moves the fixed point -i*beta of xy to infinity.
    Mat q = Mat::from_rows({{-i * beta, zero}, {one, beta.pow(-2)}});
    Mat qi = q.inverse();
    CensusRep rep;
    rep.name = "m009";
    rep.field = f;
    rep.pres = builtin_presentation("m009_geo");
    rep.pres_gens = {qi * x * q, qi * y * q};
    rep.gens = rep.pres_gens;
    return finish_rep(std::move(rep));
}

CensusRep rep_m015() {
    CensusRep rep;
    rep.name = "m015";
    FieldPtr f0 = NumberField::create(QPoly::from_ints({1, 0, -1, 1}),
                                      approx_box(0.87743883, -0.74486176));
    FieldPtr f = NumberField::conj_closure(f0);
    rep.field = f;
    NFElem ga = f->promote(f0->theta());
    NFElem one = f->from_rat(Rat(1)), zero = f->from_rat(Rat(0));
    Mat u = Mat::from_rows({{-one, -ga}, {zero, -one}});  // yx
    Mat v = Mat::from_rows({{one, zero}, {ga, one}});     // xyx
    Mat x = v * u.inverse();
    // The printed triangular matrices determine x and y only up to SL2 lift
    // sign; the sign of y is pinned by the printed cusp shape 4(gamma-1).
    Mat y = -(u * x.inverse());
    rep.pres = builtin_presentation("m015_geo");
    rep.pres_gens = {x, y};
    rep.gens = {u, v};
    return finish_rep(std::move(rep));
}

}  // namespace

CensusRep census_rep(const std::string& name) {
    if (name == "m004") return rep_m004();
    if (name == "m009") return rep_m009();
    if (name == "m015") return rep_m015();
    throw Error("unknown manifold: " + name);
}

FordResult partial_ford(const std::vector<Mat>& gens, const Mat& t1, const Mat& t2,
                        int word_len) {
    if (gens.empty()) throw Error("partial_ford: no generators");
    FieldPtr f = gens[0].field();
    NFElem tau1 = translation_amount(t1), tau2 = translation_amount(t2);
    ComplexBox e1 = round_box(tau1.embed(96)), e2 = round_box(tau2.embed(96));
    double a11 = mid(e1.re), a21 = mid(e1.im), a12 = mid(e2.re), a22 = mid(e2.im);
    double det = a11 * a22 - a12 * a21;
    if (std::abs(det) < 1e-12) throw DegenerateForm("cusp translations not independent");
    // Lattice coordinates of a complex number, numerically.
    auto coords = [&](double zr, double zi) {
        return std::pair<double, double>{(zr * a22 - zi * a12) / det,
                                         (zi * a11 - zr * a21) / det};
    };
    std::map<long, Mat> pow1, pow2;
    auto tpow = [](std::map<long, Mat>& cache, const Mat& t, long k) {
        auto it = cache.find(k);
        if (it == cache.end()) it = cache.emplace(k, t.pow(k)).first;
        return it->second;
    };
    // A sphere is kept as the pair (c, d) of its owner's bottom row, with d
    // already shifted into the base lattice cell; center and radius are only
    // made explicit for the handful of spheres that survive.  Alongside the
    // exact row we keep certified box enclosures, carried through the word
    // enumeration by interval matrix products, so most comparisons never
    // touch the exact coefficients.
    struct Raw {
        Mat m;                        // unshifted owner
        long k1, k2;                  // applied lattice shift
        NFElem c, d;                  // bottom row after the shift
        std::optional<NFElem> abs_c2; // |c|^2 = 1 / radius^2, computed on demand
        ComplexBox cb, db;            // enclosures of the shifted row
        RatInterval a2;               // enclosure of |c|^2
        double x, y, r2;              // numeric center and squared radius
    };
    std::vector<Raw> reduced;
    auto absc2 = [&](size_t i) -> const NFElem& {
        if (!reduced[i].abs_c2) reduced[i].abs_c2 = abs_sq(reduced[i].c);
        return *reduced[i].abs_c2;
    };
    std::map<std::tuple<long, long, long>, std::vector<size_t>> buckets;
    auto consider = [&](const Mat& m, const BoxMat& mb) {
        const NFElem& c = m.at(1, 0);
        if (c.is_zero()) return;
        const ComplexBox& cb = mb[2];
        double cx = mid(cb.re), cy = mid(cb.im), dx = mid(mb[3].re), dy = mid(mb[3].im);
        double cn = cx * cx + cy * cy;
        // center = -d/c
        double zx = -(dx * cx + dy * cy) / cn, zy = -(dy * cx - dx * cy) / cn;
        auto [cu, cv] = coords(zx, zy);
        long k1 = std::lround(cu), k2 = std::lround(cv);
        NFElem d = m.at(1, 1) + c * (tau1 * Rat(k1) + tau2 * Rat(k2));
        ComplexBox shift = ComplexBox(Rat(k1), Rat(0)) * e1 + ComplexBox(Rat(k2), Rat(0)) * e2;
        ComplexBox db = round_box(mb[3] + cb * shift);
        zx -= k1 * a11 + k2 * a12;
        zy -= k1 * a21 + k2 * a22;
        double r2 = 1.0 / cn;
        auto key = std::make_tuple(std::lround(zx * 4096), std::lround(zy * 4096),
                                   std::lround(r2 * 4096));
        for (long bx = -1; bx <= 1; ++bx)
            for (long by = -1; by <= 1; ++by)
                for (long br = -1; br <= 1; ++br) {
                    auto it = buckets.find({std::get<0>(key) + bx, std::get<1>(key) + by,
                                            std::get<2>(key) + br});
                    if (it == buckets.end()) continue;
                    for (size_t j : it->second) {
                        const Raw& rj = reduced[j];
                        // Rows equal up to the SL2 lift sign cover translates
                        // of the same word; general unit coincidences fall
                        // through to the cross-multiplied test.
                        if (((c - rj.c).is_zero() && (d - rj.d).is_zero()) ||
                            ((c + rj.c).is_zero() && (d + rj.d).is_zero()))
                            return;
                        if ((d * rj.c - rj.d * c).is_zero() &&
                            (absc2(j) - abs_sq(c)).is_zero())
                            return;
                    }
                }
        buckets[key].push_back(reduced.size());
        reduced.push_back({m, k1, k2, c, d, std::nullopt, cb, db,
                           round_iv(cb.norm_sq()), zx, zy, r2});
    };
    // Breadth-first over reduced words; coincidences between distinct words
    // are caught by the sphere deduplication above.
    {
        std::vector<Mat> letters;
        std::vector<BoxMat> letter_boxes;
        for (const auto& g : gens) {
            letters.push_back(g);
            letters.push_back(g.inverse());
        }
        for (const auto& g : letters) letter_boxes.push_back(box_of(g, 96));
        struct Node {
            Mat m;
            BoxMat b;
            int last;
        };
        ComplexBox one(Rat(1), Rat(0)), nil(Rat(0), Rat(0));
        std::vector<Node> frontier{{Mat::identity(2, f), {one, nil, nil, one}, -1}};
        for (int len = 0; len < word_len; ++len) {
            std::vector<Node> next_frontier;
            for (const auto& node : frontier)
                for (size_t li = 0; li < letters.size(); ++li) {
                    if (node.last >= 0 && (static_cast<size_t>(node.last) ^ 1) == li)
                        continue;
                    Mat next = node.m * letters[li];
                    BoxMat nb = box_mul(node.b, letter_boxes[li]);
                    consider(next, nb);
                    next_frontier.push_back({std::move(next), nb, static_cast<int>(li)});
                }
            frontier = std::move(next_frontier);
        }
    }
    // Visibility is decided once per reduced sphere: covering is equivariant
    // under the cusp lattice, so it suffices to test a representative against
    // nearby lattice translates of the other representatives.  A coarse
    // numeric pass nominates candidate coverers, the certified boxes settle
    // almost all of them, and only near-tangent pairs fall back to an exact
    // sign, so a sphere is never discarded without proof.
    std::array<ComplexBox, 25> lam_boxes;
    for (long m = -2; m <= 2; ++m)
        for (long n = -2; n <= 2; ++n)
            lam_boxes[(m + 2) * 5 + (n + 2)] =
                ComplexBox(Rat(m), Rat(0)) * e1 + ComplexBox(Rat(n), Rat(0)) * e2;
    size_t nr = reduced.size();
    std::vector<char> visible(nr, 1);
    for (size_t i = 0; i < nr; ++i) {
        struct Cand {
            double gap;
            size_t j;
            long m, n;
        };
        std::vector<Cand> cands;
        for (size_t j = 0; j < nr; ++j) {
            if (reduced[j].r2 <= reduced[i].r2 - 1e-12 && i != j) continue;
            for (long m = -2; m <= 2; ++m)
                for (long n = -2; n <= 2; ++n) {
                    if (i == j && m == 0 && n == 0) continue;
                    double jx = reduced[j].x + m * a11 + n * a12;
                    double jy = reduced[j].y + m * a21 + n * a22;
                    double ddx = reduced[i].x - jx, ddy = reduced[i].y - jy;
                    double gap = reduced[j].r2 - reduced[i].r2 - ddx * ddx - ddy * ddy;
                    if (gap > -1e-4) cands.push_back({gap, j, m, n});
                }
        }
        std::sort(cands.begin(), cands.end(),
                  [](const Cand& a, const Cand& b) { return a.gap > b.gap; });
        for (const auto& cand : cands) {
            // Highest point of sphere i strictly inside the (m,n)-translate of
            // sphere j?  The gap 1/|c_j|^2 - 1/|c_i|^2 - |z_i - z_j - lambda|^2
            // is tested after multiplying through by |c_i c_j|^2.
            const Raw &si = reduced[i], &sj = reduced[cand.j];
            const ComplexBox& lb = lam_boxes[(cand.m + 2) * 5 + (cand.n + 2)];
            ComplexBox cross_b =
                round_box(sj.db * si.cb - si.db * sj.cb - lb * (si.cb * sj.cb));
            RatInterval gap_b = si.a2 - sj.a2 - cross_b.norm_sq();
            if (gap_b.hi < 0) continue;
            if (!(gap_b.lo > 0)) {
                NFElem lam = tau1 * Rat(cand.m) + tau2 * Rat(cand.n);
                NFElem cross = sj.d * si.c - si.d * sj.c - lam * si.c * sj.c;
                NFElem gap = absc2(i) - absc2(cand.j) - abs_sq(cross);
                if (!(gap.sign() > 0)) continue;
            }
            visible[i] = 0;
            break;
        }
    }
    // Output: lattice translates of the visible representatives with centers
    // within two fundamental parallelograms of the origin.
    std::map<std::string, IsometricSphere> out;
    for (size_t i = 0; i < nr; ++i) {
        if (!visible[i]) continue;
        NFElem ic = absc2(i).inverse();
        NFElem center = -reduced[i].d * reduced[i].c.conj() * ic;
        for (long m = -2; m <= 2; ++m)
            for (long n = -2; n <= 2; ++n) {
                double jx = reduced[i].x + m * a11 + n * a12;
                double jy = reduced[i].y + m * a21 + n * a22;
                auto [cu, cv] = coords(jx, jy);
                if (std::abs(cu) > 2.001 || std::abs(cv) > 2.001) continue;
                NFElem zc = center + tau1 * Rat(m) + tau2 * Rat(n);
                Mat owner = reduced[i].m * tpow(pow1, t1, reduced[i].k1 - m) *
                            tpow(pow2, t2, reduced[i].k2 - n);
                out.emplace(elem_key(zc) + "|" + elem_key(ic),
                            IsometricSphere{owner, zc, ic});
            }
    }
    FordResult result;
    for (auto& [key, s] : out) result.visible.push_back(std::move(s));
    for (const auto& s : result.visible) {
        bool known = false;
        for (const auto& r : result.radii_sq)
            if ((r - s.radius_sq).is_zero()) known = true;
        if (!known) result.radii_sq.push_back(s.radius_sq);
    }
    std::sort(result.radii_sq.begin(), result.radii_sq.end(),
              [](const NFElem& a, const NFElem& b) { return (a - b).sign() > 0; });
    return result;
}

std::string prism_svg(const FordResult& ford, const NFElem& tau1, const NFElem& tau2) {
    auto pt = [](const NFElem& z) {
        auto e = z.embed(64);
        return std::pair<double, double>{mid(e.re), mid(e.im)};
    };
    auto [t1x, t1y] = pt(tau1);
    auto [t2x, t2y] = pt(tau2);
    struct Circle {
        double x, y, r;
        size_t cls;
    };
    std::vector<Circle> circles;
    // Radius classes, largest first, matching FordResult::radii_sq order.
    std::vector<NFElem> classes;
    for (const auto& s : ford.visible) {
        size_t cls = classes.size();
        for (size_t k = 0; k < classes.size(); ++k)
            if ((classes[k] - s.radius_sq).is_zero()) cls = k;
        if (cls == classes.size()) classes.push_back(s.radius_sq);
        auto [cx, cy] = pt(s.center);
        double r = std::sqrt(mid(s.radius_sq.embed(64).re));
        circles.push_back({cx, cy, r, cls});
    }
    std::vector<size_t> order(classes.size());
    {
        std::vector<size_t> idx(classes.size());
        for (size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
            return (classes[a] - classes[b]).sign() > 0;
        });
        for (size_t k = 0; k < idx.size(); ++k) order[idx[k]] = k;
    }
    static const char* palette[] = {"#4c72b0", "#dd8452", "#55a868",
                                    "#c44e52", "#8172b3", "#937860"};
    double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
    auto stretch = [&](double x, double y, double r) {
        lo_x = std::min(lo_x, x - r);
        hi_x = std::max(hi_x, x + r);
        lo_y = std::min(lo_y, y - r);
        hi_y = std::max(hi_y, y + r);
    };
    for (const auto& c : circles) stretch(c.x, c.y, c.r);
    stretch(t1x, t1y, 0);
    stretch(t2x, t2y, 0);
    stretch(t1x + t2x, t1y + t2y, 0);
    double pad = 0.25;
    double scale = 100.0;
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(3);
    auto sx = [&](double x) { return (x - lo_x + pad) * scale; };
    auto sy = [&](double y) { return (hi_y - y + pad) * scale; };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << (hi_x - lo_x + 2 * pad) * scale << "\" height=\""
        << (hi_y - lo_y + 2 * pad) * scale << "\">\n";
    out << "<polygon points=\"" << sx(0) << "," << sy(0) << " " << sx(t1x) << ","
        << sy(t1y) << " " << sx(t1x + t2x) << "," << sy(t1y + t2y) << " " << sx(t2x)
        << "," << sy(t2y)
        << "\" fill=\"none\" stroke=\"#222222\" stroke-width=\"2\"/>\n";
    for (const auto& c : circles) {
        const char* color = palette[order[c.cls] % 6];
        out << "<circle cx=\"" << sx(c.x) << "\" cy=\"" << sy(c.y) << "\" r=\""
            << c.r * scale << "\" fill=\"" << color
            << "\" fill-opacity=\"0.35\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void emit_prism_svg(const FordResult& ford, const NFElem& tau1, const NFElem& tau2,
                    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out << prism_svg(ford, tau1, tau2);
    if (!out) throw Error("failed writing " + path);
}

}  // namespace crford
