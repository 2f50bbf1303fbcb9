#pragma once

#include <memory>
#include <vector>

#include "padicnn/bigint.hpp"

namespace padicnn {

/// Deterministic primality test. Trial division by small primes, then
/// Miller-Rabin with the witness set {2,...,37}, which is exhaustive for
/// n < 3.317e24. Larger candidates are rejected with an exception rather
/// than answered probabilistically.
bool is_prime(const BigInt& n);

class PadicContext;
using ContextPtr = std::shared_ptr<const PadicContext>;

/// Immutable description of the working ring Z/p^E Z: the prime, the
/// precision exponent E >= 1 and the table of powers p^0..p^E. Shared
/// read-only between all values built on it; safe across threads.
class PadicContext {
public:
    static ContextPtr create(BigInt prime, int precision);

    const BigInt& prime() const { return prime_; }
    int precision() const { return precision_; }                   // E
    const BigInt& modulus() const { return powers_[precision_]; }  // p^E

    /// p^k from the precomputed table; requires 0 <= k <= E.
    const BigInt& pow(int k) const;

    /// p^k for any k >= 0 (computed past the table when k > E).
    BigInt pow_extended(int k) const;

    /// Contexts are interchangeable iff they agree on (p, E).
    bool same(const PadicContext& other) const {
        return precision_ == other.precision_ && prime_ == other.prime_;
    }

private:
    PadicContext(BigInt prime, int precision);

    BigInt prime_;
    int precision_;
    std::vector<BigInt> powers_;  // exactly E+1 entries, powers_[v] = p^v
};

}  // namespace padicnn
