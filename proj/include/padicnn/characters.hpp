#pragma once

#include <memory>
#include <vector>

#include "padicnn/padic.hpp"

namespace padicnn {

/// Entry e is the valuative decomposition of e!, coprime part reduced mod
/// p^E. Entry 0 is (0, 1).
using FactorialTable = std::vector<ValuativePair>;

/// Table of factorial decompositions up to max_index, grown lazily and
/// cached per (p, E). The returned snapshot is immutable and safe to share.
std::shared_ptr<const FactorialTable> factorial_table(const PadicContext& ctx, int max_index);

/// Constants of the p-adic exponential at precision E:
///   q = p^q_valuation is the convergence scale (4 when p = 2, p otherwise),
///   series_length is the truncation degree E' = ceil(E / (m - 1/(p-1))).
struct ExpConstants {
    int q_valuation = 1;  // m: 2 when p = 2, 1 otherwise
    BigInt q;
    int series_length = 1;  // E'
};

ExpConstants exp_constants(const BigInt& p, int precision);

/// A p-adic character on Zp at precision E, identified by its base
/// a in 1 + pZp (mod p^E): x maps to a^x mod p^E.
class Character {
public:
    static Character with_base(ContextPtr ctx, const BigInt& base);
    /// The character of base exp_p(q); remembers the construction so it can
    /// serialize without spelling the base out.
    static Character exponential(ContextPtr ctx);

    const ContextPtr& context() const { return ctx_; }
    const BigInt& base() const { return base_; }
    bool is_exponential() const { return exponential_; }

    bool operator==(const Character& o) const {
        return ctx_->same(*o.ctx_) && base_ == o.base_;
    }

private:
    Character(ContextPtr ctx, BigInt base, bool exponential);
    ContextPtr ctx_;
    BigInt base_;
    bool exponential_;
};

enum class EvalMethod { mahler, taylor, binary };

/// a^x mod p^E by the truncated Mahler series sum_{e<E} binom(x,e)(a-1)^e.
/// x is reduced mod p^(E-1) on entry.
BigInt eval_mahler(const Character& chi, const BigInt& x);

/// exp_p(q x) mod p^E by the truncated Taylor series; x reduced mod p^(E-m).
BigInt eval_taylor_exp(const PadicContext& ctx, const BigInt& x);

/// a^x mod p^E by square-and-multiply on the natural representative of x.
BigInt eval_binary(const Character& chi, const BigInt& x);

/// Dispatch on method. The taylor route for a general base goes through
/// a^x = exp_p((log_p a) x), with the p = 2, a = -1 mod 4 sign split handled
/// from the parity of the natural argument.
BigInt eval_character(const Character& chi, const BigInt& x,
                      EvalMethod method = EvalMethod::binary);

/// Iwasawa logarithm sum_{e>=1} -(1-y)^e / e mod p^E. Requires y = 1 mod p,
/// and y = 1 mod 4 when p = 2 (the sign-split branch feeds -y here instead).
BigInt iwasawa_log(const PadicContext& ctx, const BigInt& y);

/// Decidable mod-p^E surrogate of injectivity: false iff a = 1 mod p^E, or
/// p = 2 and a = -1 mod 2^E. Exactness of the base beyond precision E is the
/// caller's responsibility.
bool is_injective(const Character& chi);

struct CharacterInverse {
    BigInt x;                // canonical in [0, p^certified_exponent)
    int certified_exponent;  // E minus the valuation cancelled from the logs
};

/// Inverse of an injective character on its image: x with chi(x) = y mod p^E,
/// computed as log(+-y)/log(+-a) after cancelling the common valuation. The
/// result is certified only mod p^certified_exponent.
CharacterInverse invert_character(const Character& chi, const BigInt& y);

/// Pointwise product of characters: base a0*a1 mod p^E.
Character character_multiply(const Character& a, const Character& b);

}  // namespace padicnn
