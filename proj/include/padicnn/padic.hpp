#pragma once

#include <cstdint>
#include <utility>

#include "padicnn/context.hpp"

namespace padicnn {

/// x = p^valuation * unit with gcd(unit, p) = 1.
struct ValuativePair {
    int valuation = 0;
    BigInt unit = 1;
    bool operator==(const ValuativePair&) const = default;
};

/// Valuative decomposition of a positive integer. x = 0 is rejected: the
/// defining loop has no fixed point there and every caller feeds x >= 1.
ValuativePair valuative_decomposition(const BigInt& p, const BigInt& x);

enum class InverseStrategy {
    euclid,       // extended Euclidean algorithm (default)
    euler_power,  // x^(phi(p^e) - 1) mod p^e
    taylor_lift,  // Newton lift seeded from an inverse-mod-p table
};

struct InverseConfig {
    InverseStrategy strategy = InverseStrategy::euclid;
    // taylor_lift only engages when the modulus is at least this large and
    // the prime fits a table; otherwise it falls back to euclid. The
    // preprocess costs O(p) space per prime.
    BigInt taylor_min_modulus = BigInt(1) << 64;
    std::uint32_t taylor_max_prime = 1u << 20;
};

/// Inverse of x in (Z/p^e Z)^x, canonical in [0, p^e). Requires 1 <= e <= E
/// and x coprime to p.
BigInt mod_inverse(const PadicContext& ctx, const BigInt& x, int e,
                   const InverseConfig& config = {});

/// An element of Z/p^E Z, stored canonically in [0, p^E). Immutable value
/// type; arithmetic reduces into the canonical range.
class PadicResidue {
public:
    PadicResidue(ContextPtr ctx, const BigInt& raw);

    const ContextPtr& context() const { return ctx_; }
    const BigInt& value() const { return value_; }

    PadicResidue operator+(const PadicResidue& o) const;
    PadicResidue operator-(const PadicResidue& o) const;
    PadicResidue operator*(const PadicResidue& o) const;
    PadicResidue operator-() const;
    bool operator==(const PadicResidue& o) const;

    /// a^n mod p^E for n >= 0.
    PadicResidue pow(const BigInt& exponent) const;

    /// Inverse mod p^e (e defaults to full precision).
    PadicResidue inverse(int e = -1, const InverseConfig& config = {}) const;

private:
    ContextPtr ctx_;
    BigInt value_;
};

/// p^(-F) * numerator with numerator canonical in [0, p^(E+F)); the value is
/// determined mod p^E. Houses observed values and the C coefficients.
class ScaledPadic {
public:
    ScaledPadic(ContextPtr ctx, int denom_exponent, const BigInt& raw_numerator);

    const ContextPtr& context() const { return ctx_; }
    int denom_exponent() const { return denom_exponent_; }  // F
    const BigInt& numerator() const { return num_; }
    BigInt modulus() const { return ctx_->pow_extended(ctx_->precision() + denom_exponent_); }

    ScaledPadic operator+(const ScaledPadic& o) const;
    ScaledPadic operator-(const ScaledPadic& o) const;
    /// Product of values certified mod p^E with denominators F is certified
    /// mod p^(E-F) with denominator 2F; requires equal (E, F) and E > F.
    ScaledPadic operator*(const ScaledPadic& o) const;
    bool operator==(const ScaledPadic& o) const;

private:
    ContextPtr ctx_;
    int denom_exponent_;
    BigInt num_;
};

/// Valuation and norm under the fixed normalisation |p| = p^(-1). When the
/// numerator vanishes at its known precision the valuation is only bounded
/// below (at_precision_cap = true) and norm is the matching upper bound.
struct NormInfo {
    long long valuation = 0;
    bool at_precision_cap = false;
    BigRational norm;  // p^(-valuation)

    bool operator==(const NormInfo&) const = default;
};

NormInfo padic_norm(const PadicResidue& x);
NormInfo padic_norm(const ScaledPadic& x);

}  // namespace padicnn
