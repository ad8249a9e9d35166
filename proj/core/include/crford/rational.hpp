#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace crford {

using Rat = mpq_class;
using Int = mpz_class;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RejectReducible : Error { using Error::Error; };
struct RejectAmbiguousRoot : Error { using Error::Error; };
struct ExtensionFailure : Error { using Error::Error; };
struct DivisionByZero : Error { using Error::Error; };
struct NotReal : Error { using Error::Error; };
struct PrecisionExhausted : Error { using Error::Error; };
struct FieldMismatch : Error { using Error::Error; };
struct DegenerateForm : Error { using Error::Error; };
struct NotIsometry : Error { using Error::Error; };
struct FixesInfinity : Error { using Error::Error; };
struct NotParabolic : Error { using Error::Error; };
struct NoCommonFixedPoint : Error { using Error::Error; };
struct NoAccidentalParabolic : Error { using Error::Error; };
struct CycleOverflow : Error { using Error::Error; };
struct AdjoinRequired : Error { using Error::Error; };

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline Rat rat_parse(const std::string& s) {
    Rat q;
    if (q.set_str(s, 10) != 0) throw Error("bad rational literal: " + s);
    q.canonicalize();
    return q;
}

// Nearest dyadic p/2^bits.  Used to keep Newton iterates from growing
// unbounded denominators.
inline Rat round_dyadic(const Rat& q, unsigned long bits) {
    Int scaled_num = q.get_num() << bits;
    Int p, r;
    mpz_fdiv_qr(p.get_mpz_t(), r.get_mpz_t(), scaled_num.get_mpz_t(),
                q.get_den().get_mpz_t());
    // round half up
    if (Int(r * 2) >= q.get_den()) p += 1;
    Rat out(p, Int(1) << bits);
    out.canonicalize();
    return out;
}

// Upper bound for sqrt(q), q >= 0.  Exact when q is a perfect square of a
// rational with power-of-two structure; otherwise within one ulp at the
// chosen guard precision.
inline Rat sqrt_upper(const Rat& q, unsigned long guard_bits = 64) {
    if (q < 0) throw Error("sqrt_upper of negative");
    if (q == 0) return Rat(0);
    Int num = q.get_num() << (2 * guard_bits);
    Int den = q.get_den();
    // ceil(sqrt(num/den)) <= (isqrt(num*den)+1)/den
    Int s;
    mpz_sqrt(s.get_mpz_t(), Int(num * den).get_mpz_t());
    s += 1;
    Rat out(s, den << guard_bits);
    out.canonicalize();
    return out;
}

inline Rat sqrt_lower(const Rat& q, unsigned long guard_bits = 64) {
    if (q < 0) throw Error("sqrt_lower of negative");
    if (q == 0) return Rat(0);
    Int num = q.get_num() << (2 * guard_bits);
    Int den = q.get_den();
    Int s;
    mpz_sqrt(s.get_mpz_t(), Int(num * den).get_mpz_t());
    Rat out(s, den << guard_bits);
    out.canonicalize();
    if (out * out > q) out = Rat(0);  // q tiny; 0 is always a valid lower bound
    return out;
}

}  // namespace crford
