#pragma once

#include "crford/roots.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace crford {

class NumberField;
using FieldPtr = std::shared_ptr<const NumberField>;

// Element of Q(theta): rational coefficient vector in the power basis
// 1, theta, ..., theta^{deg-1}.  Value semantics; exact zero test.
class NFElem {
  public:
    NFElem() = default;  // rational zero
    NFElem(FieldPtr field, std::vector<Rat> coeffs);

    const FieldPtr& field() const { return field_; }
    const std::vector<Rat>& coeffs() const { return c_; }

    bool is_zero() const;
    bool is_rational() const;
    Rat rat_value() const;  // requires is_rational()

    NFElem operator+(const NFElem& o) const;
    NFElem operator-(const NFElem& o) const;
    NFElem operator*(const NFElem& o) const;
    NFElem operator/(const NFElem& o) const;
    NFElem operator-() const;
    NFElem inverse() const;
    NFElem pow(long e) const;
    bool operator==(const NFElem& o) const;
    bool operator!=(const NFElem& o) const { return !(*this == o); }

    NFElem operator+(const Rat& q) const;
    NFElem operator-(const Rat& q) const;
    NFElem operator*(const Rat& q) const;
    NFElem operator/(const Rat& q) const;

    // Complex conjugate via the field automorphism; throws if the field has
    // no conjugation map (use NumberField::conj_closure first).
    NFElem conj() const;
    bool is_real() const;

    // Certified complex rectangle of width < 2^(1-precision_bits).
    ComplexBox embed(unsigned precision_bits) const;
    // Certified sign of a real element: -1, 0, +1.
    int sign() const;

    // Total ordering on the raw representation (field pointer, coeffs); used
    // as a deterministic map key, not a numeric order.
    static int rep_cmp(const NFElem& a, const NFElem& b);

  private:
    FieldPtr field_;
    std::vector<Rat> c_;  // size == field degree (or empty for rational 0)
    void check_same(const NFElem& o, NFElem& ap, NFElem& bp) const;
};

// Dense polynomial with NFElem coefficients, over one field.  Supports the
// Euclidean operations needed for root extraction and adjunction.
class NFPoly {
  public:
    NFPoly() = default;
    explicit NFPoly(std::vector<NFElem> coeffs) : c_(std::move(coeffs)) { trim(); }
    static NFPoly from_qpoly(const QPoly& p, const FieldPtr& f);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const NFElem& operator[](size_t i) const { return c_[i]; }
    const std::vector<NFElem>& coeffs() const { return c_; }

    NFPoly operator+(const NFPoly& o) const;
    NFPoly operator-(const NFPoly& o) const;
    NFPoly operator*(const NFPoly& o) const;
    std::pair<NFPoly, NFPoly> divmod(const NFPoly& o) const;
    NFPoly monic() const;
    NFPoly derivative() const;
    NFElem eval(const NFElem& x) const;

  private:
    void trim();
    std::vector<NFElem> c_;
};

NFPoly gcd(const NFPoly& a, const NFPoly& b);

// Absolute number field Q(theta) with a certified complex embedding.
// Immutable after construction up to internally synchronized refinement of
// the isolating root disk.
class NumberField : public std::enable_shared_from_this<NumberField> {
  public:
    // The rationals as the degree-1 field (min_poly = x, theta = 0).
    static FieldPtr rationals();

    // nf_create: monic integer min_poly, designated root.  Throws
    // RejectReducible / RejectAmbiguousRoot.
    static FieldPtr create(const QPoly& min_poly, const ComplexBox& approx_root);

    struct AdjoinResult {
        FieldPtr field;       // base itself when the root already lay in it
        NFElem element;       // the adjoined root, expressed in `field`
        bool extended = false;
    };

    // nf_adjoin: adjoin the root of a rational polynomial nearest the given
    // approximation.  Returns an absolute field with the base embedded and
    // all ancestor promotions recorded.
    static AdjoinResult adjoin_root(const FieldPtr& base, const QPoly& h,
                                    const ComplexBox& approx_root);

    // nf_adjoin, square-root form.  Branch selected by approx (or the
    // principal value of the embedding when absent).
    static AdjoinResult adjoin_sqrt(const FieldPtr& base, const NFElem& e,
                                    std::optional<ComplexBox> approx = std::nullopt);

    // Smallest recorded extension closed under complex conjugation (the
    // field itself when already closed).
    static FieldPtr conj_closure(const FieldPtr& f);

    int degree() const { return min_poly_.degree(); }
    const QPoly& min_poly() const { return min_poly_; }
    bool is_rationals() const { return degree() == 1; }

    NFElem theta() const;
    NFElem from_rat(const Rat& q) const;
    NFElem element(std::vector<Rat> coeffs) const;

    bool has_conj() const { return conj_theta_.has_value(); }
    const std::vector<Rat>& conj_theta() const;

    // Membership of another field in this one via the recorded tower.
    bool knows(const NumberField* sub) const;
    NFElem promote(const NFElem& x) const;

    // Certified enclosure of theta with rad <= 2^-bits (thread-safe).
    ComplexBox theta_box(unsigned bits) const;

    // Rational min poly (over Q) of an element, via the characteristic
    // polynomial of its multiplication matrix.
    static QPoly abs_min_poly(const NFElem& e);

    static constexpr unsigned kPrecisionCap = 16384;

  private:
    NumberField() = default;
    static std::shared_ptr<NumberField> create_raw(const QPoly& mp, const RootDisk& disk);
    static void detect_conj(const std::shared_ptr<NumberField>& f);
    friend struct NumberFieldAccess;

    QPoly min_poly_;
    mutable RootDisk root_;
    mutable std::mutex root_mutex_;
    std::optional<std::vector<Rat>> conj_theta_;
    std::map<const NumberField*, std::vector<Rat>> sub_theta_;  // ancestor theta images
    std::vector<FieldPtr> parents_;                             // keep ancestors alive
};

}  // namespace crford
