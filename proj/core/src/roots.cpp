#include "crford/roots.hpp"

#include <algorithm>
#include <cmath>

namespace crford {

namespace {

// Exact complex rational, local helper.
struct QC {
    Rat re, im;
    QC operator+(const QC& o) const { return {re + o.re, im + o.im}; }
    QC operator-(const QC& o) const { return {re - o.re, im - o.im}; }
    QC operator*(const QC& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    Rat norm_sq() const { return re * re + im * im; }
    QC div(const QC& o) const {
        Rat n = o.norm_sq();
        if (n == 0) throw DivisionByZero("complex division by zero");
        QC num = *this * QC{o.re, -o.im};
        return {num.re / n, num.im / n};
    }
};

QC eval_qc(const QPoly& f, const QC& z) {
    QC acc{Rat(0), Rat(0)};
    for (size_t i = f.coeffs().size(); i-- > 0;)
        acc = acc * z + QC{f[i], Rat(0)};
    return acc;
}

// Upper bound on n*|f(c)/f'(c)|: every polynomial has a root within that
// distance of c (Kantorovich-type bound via 1/sum(1/(c-r_i))).
Rat newton_radius(const QPoly& f, const QPoly& df, const QC& c) {
    QC fv = eval_qc(f, c);
    QC dv = eval_qc(df, c);
    Rat dn = dv.norm_sq();
    if (dn == 0) throw Error("derivative vanished at approximation");
    Rat ratio_sq = fv.norm_sq() / dn;
    return Rat(f.degree()) * sqrt_upper(ratio_sq);
}

QC round_qc(const QC& z, unsigned long bits) {
    return {round_dyadic(z.re, bits), round_dyadic(z.im, bits)};
}

// Smallest multiple of 2^-bits that is >= q.
Rat dyadic_up(const Rat& q, unsigned long bits) {
    Int den = Int(1) << bits;
    Int num;
    Rat scaled = q * Rat(den);
    mpz_cdiv_q(num.get_mpz_t(), scaled.get_num().get_mpz_t(), scaled.get_den().get_mpz_t());
    return Rat(num) / Rat(den);
}

long log2_mag(const Rat& q);

// Newton radii are exact ratios of polynomial values and carry thousands of
// bits; downstream interval products compound that.  Round the enclosure
// outward to dyadics with just enough precision that the radius grows by at
// most a quarter.
RootDisk round_disk(const RootDisk& d) {
    if (d.rad == 0) return d;
    long e = log2_mag(d.rad);
    long want = 5 - e;
    unsigned long bits = want < 16 ? 16 : static_cast<unsigned long>(want);
    Rat re = round_dyadic(d.re, bits);
    Rat im = round_dyadic(d.im, bits);
    // the center moved by at most 2^-bits in each coordinate
    Rat rad = dyadic_up(d.rad, bits) + Rat(Int(1), Int(1) << (bits - 1));
    return {std::move(re), std::move(im), std::move(rad)};
}

// log2 of |q| to within a unit or so; q != 0.
long log2_mag(const Rat& q) {
    long n = static_cast<long>(mpz_sizeinbase(q.get_num().get_mpz_t(), 2));
    long d = static_cast<long>(mpz_sizeinbase(q.get_den().get_mpz_t(), 2));
    return n - d;
}

}  // namespace

std::vector<std::complex<double>> numeric_roots(const QPoly& f) {
    int n = f.degree();
    // Convert coefficients exponent-safely: resultants of towers have
    // coefficients far outside double range.
    long emax = 0;
    bool first = true;
    for (int i = 0; i <= n; ++i) {
        if (f[i] == 0) continue;
        long e = log2_mag(f[i]);
        emax = first ? e : std::max(emax, e);
        first = false;
    }
    std::vector<std::complex<double>> c(n + 1);
    for (int i = 0; i <= n; ++i) {
        if (f[i] == 0) continue;
        Rat scaled = f[i];
        long sh = emax;
        if (sh > 0)
            scaled /= Rat(Int(1) << static_cast<unsigned long>(sh));
        else if (sh < 0)
            scaled *= Rat(Int(1) << static_cast<unsigned long>(-sh));
        c[i] = scaled.get_d();
    }
    auto eval = [&](std::complex<double> z) {
        std::complex<double> acc = 0;
        for (int i = n; i >= 0; --i) acc = acc * z + c[i];
        return acc;
    };
    // Durand-Kerner from a non-real geometric start.
    std::vector<std::complex<double>> z(n);
    std::complex<double> seed(0.4, 0.9);
    std::complex<double> p(1, 0);
    for (int i = 0; i < n; ++i) {
        p *= seed;
        z[i] = p;
    }
    for (int iter = 0; iter < 600; ++iter) {
        double moved = 0;
        for (int i = 0; i < n; ++i) {
            std::complex<double> denom = c[n];
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= z[i] - z[j];
            std::complex<double> step = eval(z[i]) / denom;
            z[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-14) break;
    }
    return z;
}

RootDisk refine_disk(const RootDisk& d, const QPoly& f, const Rat& target_rad) {
    if (d.rad <= target_rad) return d;
    QPoly df = f.derivative();
    QC c{d.re, d.im};
    RootDisk cur = d;
    // Working dyadic precision, grown geometrically with progress.
    unsigned long bits = 64;
    {
        // start from roughly the current accuracy
        Rat r = cur.rad;
        while (r < 1 && bits < 16384) {
            r *= 16;
            bits += 4;
        }
    }
    for (int iter = 0; iter < 200; ++iter) {
        bits = std::min<unsigned long>(2 * bits + 32, 1u << 20);
        QC next = c - eval_qc(f, c).div(eval_qc(df, c));
        next = round_qc(next, bits);
        Rat r = newton_radius(f, df, next);
        RootDisk cand = round_disk({next.re, next.im, r});
        if (d.contains(cand)) {
            cur = cand;
            c = next;
            if (cur.rad <= target_rad) return cur;
        } else {
            // Newton left the isolating disk: the step was computed from a
            // poor center; continue from the candidate anyway only if it
            // still overlaps, else fail.
            if (cand.disjoint(d)) throw PrecisionExhausted("newton escaped isolating disk");
            c = next;
        }
    }
    throw PrecisionExhausted("root refinement did not converge");
}

std::vector<RootDisk> isolate_roots(const QPoly& fin) {
    int n = fin.degree();
    if (n <= 0) return {};
    // Balance coefficient magnitudes with x -> 2^t x so numeric seeding
    // stays inside double range.
    long t = 0;
    {
        int i0 = 0;
        while (fin[i0] == 0) ++i0;
        if (i0 < n) {
            long lo = log2_mag(fin[i0]);
            long hi = log2_mag(fin[n]);
            t = (lo - hi) / (2 * (n - i0));
        }
    }
    Rat sc(1);
    if (t > 0)
        sc = Rat(Int(1) << static_cast<unsigned long>(t));
    else if (t < 0)
        sc = Rat(1, Int(1) << static_cast<unsigned long>(-t));
    QPoly f = fin.scale_arg(sc).monic();
    QPoly df = f.derivative();
    auto approx = numeric_roots(f);

    for (unsigned long bits = 64; bits <= 16384; bits *= 2) {
        std::vector<RootDisk> disks;
        bool ok = true;
        for (auto& z : approx) {
            QC c{round_dyadic(Rat(z.real()), bits), round_dyadic(Rat(z.imag()), bits)};
            // polish
            try {
                for (int k = 0; k < 40; ++k) {
                    Rat r = newton_radius(f, df, c);
                    if (r * (4 * n) < 1 || k > 30) break;
                    c = round_qc(c - eval_qc(f, c).div(eval_qc(df, c)), bits);
                }
                // a few extra contractions for tightness
                for (int k = 0; k < 8; ++k)
                    c = round_qc(c - eval_qc(f, c).div(eval_qc(df, c)), bits);
                disks.push_back(round_disk({c.re, c.im, newton_radius(f, df, c)}));
            } catch (const Error&) {
                ok = false;
                break;
            }
        }
        if (ok) {
            // n pairwise disjoint disks, each containing at least one of the
            // n roots, isolate all roots.
            for (size_t i = 0; ok && i < disks.size(); ++i)
                for (size_t j = i + 1; ok && j < disks.size(); ++j)
                    if (!disks[i].disjoint(disks[j])) ok = false;
        }
        if (ok) {
            if (sc != 1)
                for (auto& d : disks) {
                    d.re *= sc;
                    d.im *= sc;
                    d.rad *= sc;
                }
            std::sort(disks.begin(), disks.end(), [](const RootDisk& a, const RootDisk& b) {
                return a.re != b.re ? a.re < b.re : a.im < b.im;
            });
            return disks;
        }
    }
    throw PrecisionExhausted("could not isolate roots");
}

namespace {

// Group certified root enclosures of a real polynomial into complex-conjugate
// classes (singleton for real roots), refining until the pairing is
// unambiguous.
std::vector<std::vector<size_t>> conj_classes(const QPoly& f, std::vector<RootDisk>& disks) {
    size_t n = disks.size();
    for (int round = 0; round < 64; ++round) {
        std::vector<long> match(n, -1);
        bool ok = true;
        for (size_t i = 0; i < n && ok; ++i) {
            RootDisk ci{disks[i].re, -disks[i].im, disks[i].rad};
            long hit = -1;
            for (size_t j = 0; j < n; ++j) {
                if (!ci.disjoint(disks[j])) {
                    if (hit >= 0) {
                        hit = -2;
                        break;
                    }
                    hit = static_cast<long>(j);
                }
            }
            if (hit < 0) ok = false;
            match[i] = hit;
        }
        if (ok)
            for (size_t i = 0; i < n && ok; ++i)
                if (match[static_cast<size_t>(match[i])] != static_cast<long>(i)) ok = false;
        if (ok) {
            std::vector<std::vector<size_t>> classes;
            std::vector<char> used(n, 0);
            for (size_t i = 0; i < n; ++i) {
                if (used[i]) continue;
                size_t j = static_cast<size_t>(match[i]);
                used[i] = used[j] = 1;
                if (j == i)
                    classes.push_back({i});
                else
                    classes.push_back({i, j});
            }
            return classes;
        }
        for (auto& d : disks) d = refine_disk(d, f, d.rad / 16);
    }
    throw PrecisionExhausted("conjugate pairing of roots did not resolve");
}

// Does the interval provably contain no integer?  Requires width < 1 for a
// definite answer; sets `decided` accordingly.
bool no_integer_proven(const RatInterval& iv, bool& decided) {
    Int lo, hi;
    mpz_cdiv_q(lo.get_mpz_t(), iv.lo.get_num().get_mpz_t(), iv.lo.get_den().get_mpz_t());
    mpz_fdiv_q(hi.get_mpz_t(), iv.hi.get_num().get_mpz_t(), iv.hi.get_den().get_mpz_t());
    if (lo > hi) {
        decided = true;
        return true;
    }
    decided = (iv.hi - iv.lo < 1);
    return false;
}

bool interval_unique_integer(const RatInterval& iv, Int& out) {
    Int lo, hi;
    mpz_cdiv_q(lo.get_mpz_t(), iv.lo.get_num().get_mpz_t(), iv.lo.get_den().get_mpz_t());
    mpz_fdiv_q(hi.get_mpz_t(), iv.hi.get_num().get_mpz_t(), iv.hi.get_den().get_mpz_t());
    if (lo != hi) return false;
    out = lo;
    return true;
}

enum class ScanResult { Found, ProvenNone, Inconclusive };

// Try every union of conjugate classes (containing class `must` when
// must >= 0) with total root count <= max_deg, smallest first.  A subset is
// accepted only when all candidate coefficients pin unique integers and exact
// trial division succeeds, so hits are genuine factors.  A subset is ruled
// out only when some coefficient interval provably avoids the integers (or a
// pinned candidate fails division), so ProvenNone is a certificate.
ScanResult scan_subsets(const QPoly& f, const std::vector<ComplexBox>& boxes,
                        const std::vector<std::vector<size_t>>& classes, long must,
                        int max_deg, QPoly& out) {
    size_t m = classes.size();
    std::vector<size_t> opt;
    for (size_t i = 0; i < m; ++i)
        if (static_cast<long>(i) != must) opt.push_back(i);
    if (opt.size() > 24) throw Error("factor recombination too large");
    struct Cand {
        unsigned mask;
        int deg;
    };
    std::vector<Cand> cands;
    cands.reserve(1u << opt.size());
    int base_deg = must >= 0 ? static_cast<int>(classes[static_cast<size_t>(must)].size()) : 0;
    for (unsigned mask = 0; mask < (1u << opt.size()); ++mask) {
        int deg = base_deg;
        for (size_t b = 0; b < opt.size(); ++b)
            if (mask & (1u << b)) deg += static_cast<int>(classes[opt[b]].size());
        if (deg >= 1 && deg <= max_deg) cands.push_back({mask, deg});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return a.deg != b.deg ? a.deg < b.deg : a.mask < b.mask;
    });
    Rat lc = f.lc();
    bool all_decided = true;
    for (const Cand& cd : cands) {
        std::vector<size_t> idx;
        if (must >= 0)
            idx = classes[static_cast<size_t>(must)];
        for (size_t b = 0; b < opt.size(); ++b)
            if (cd.mask & (1u << b))
                idx.insert(idx.end(), classes[opt[b]].begin(), classes[opt[b]].end());
        // candidate = lc * prod (x - root_i)
        std::vector<ComplexBox> cf{ComplexBox(lc, Rat(0))};
        for (size_t i : idx) {
            std::vector<ComplexBox> nf(cf.size() + 1);
            for (size_t j = 0; j < cf.size(); ++j) {
                nf[j + 1] = nf[j + 1] + cf[j];
                nf[j] = nf[j] - cf[j] * boxes[i];
            }
            cf = std::move(nf);
        }
        bool ruled_out = false, pinned = true;
        std::vector<Rat> cand(cf.size());
        for (size_t j = 0; j < cf.size(); ++j) {
            if (!cf[j].im.contains_zero()) {
                ruled_out = true;
                break;
            }
            bool decided = false;
            if (no_integer_proven(cf[j].re, decided)) {
                ruled_out = true;
                break;
            }
            Int v;
            if (!decided || !interval_unique_integer(cf[j].re, v)) {
                pinned = false;
                if (!decided) all_decided = false;
            } else {
                cand[j] = Rat(v);
            }
        }
        if (ruled_out) continue;
        if (!pinned) continue;
        QPoly g = primitive_integer(QPoly(std::move(cand)));
        if (g.degree() == cd.deg) {
            auto [q, r] = f.divmod(g);
            if (r.is_zero()) {
                out = g;
                return ScanResult::Found;
            }
        }
        // pinned but not a divisor: this subset is proven not a factor
    }
    return all_decided ? ScanResult::ProvenNone : ScanResult::Inconclusive;
}

// Factor a squarefree primitive integer polynomial by recombining certified
// root enclosures.
std::vector<QPoly> factor_squarefree(QPoly f) {
    std::vector<QPoly> out;
    while (f.degree() > 1) {
        int n = f.degree();
        auto disks = isolate_roots(f);
        auto classes = conj_classes(f, disks);
        Rat eps(1, Int(1) << 64);
        bool split = false, done = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            for (auto& d : disks) d = refine_disk(d, f, eps);
            std::vector<ComplexBox> boxes;
            boxes.reserve(disks.size());
            for (auto& d : disks) boxes.push_back(d.box());
            QPoly g;
            ScanResult r = scan_subsets(f, boxes, classes, -1, n / 2, g);
            if (r == ScanResult::Found) {
                out.push_back(g);
                f = primitive_integer(f.divmod(g).first);
                split = true;
                break;
            }
            if (r == ScanResult::ProvenNone) {
                done = true;  // irreducible
                break;
            }
            eps /= (Int(1) << 128);
        }
        if (done) break;
        if (!split) throw PrecisionExhausted("factor recombination did not resolve");
    }
    if (f.degree() >= 1) out.push_back(f);
    return out;
}

}  // namespace

QPoly min_poly_factor_at(const QPoly& fin, std::vector<RootDisk> disks, size_t target) {
    QPoly f = primitive_integer(fin);
    if (f.lc() < 0) f = -f;
    int n = f.degree();
    if (n <= 1) return f;
    if (disks.size() != static_cast<size_t>(n))
        throw Error("min_poly_factor_at: wrong number of root enclosures");
    auto classes = conj_classes(f, disks);
    long must = -1;
    for (size_t i = 0; i < classes.size(); ++i)
        for (size_t j : classes[i])
            if (j == target) must = static_cast<long>(i);
    Rat eps(1, Int(1) << 64);
    for (int attempt = 0; attempt < 40; ++attempt) {
        for (auto& d : disks) d = refine_disk(d, f, eps);
        std::vector<ComplexBox> boxes;
        boxes.reserve(disks.size());
        for (auto& d : disks) boxes.push_back(d.box());
        QPoly g;
        ScanResult r = scan_subsets(f, boxes, classes, must, n - 1, g);
        if (r == ScanResult::Found) {
            if (g.lc() < 0) g = -g;
            return g;
        }
        if (r == ScanResult::ProvenNone) return f;  // irreducible
        eps /= (Int(1) << 128);
    }
    throw PrecisionExhausted("minimal polynomial extraction did not resolve");
}

std::vector<QPoly> factor_rational(const QPoly& fin) {
    if (fin.is_zero()) throw Error("factor of zero polynomial");
    QPoly f = primitive_integer(fin);
    if (f.degree() == 0) return {};
    std::vector<QPoly> out;
    QPoly sqf = primitive_integer(squarefree_part(f));
    for (const QPoly& g : factor_squarefree(sqf)) {
        // recover multiplicity
        QPoly rest = f;
        while (true) {
            auto [q, r] = rest.divmod(g);
            if (!r.is_zero()) break;
            out.push_back(g);
            rest = q;
        }
    }
    return out;
}

bool is_irreducible(const QPoly& f) {
    if (f.degree() < 1) return false;
    if (f.degree() == 1) return true;
    auto fs = factor_rational(f);
    return fs.size() == 1 && fs[0].degree() == f.degree();
}

}  // namespace crford
