#pragma once

#include <random>

#include "padicnn/bigint.hpp"
#include "padicnn/context.hpp"

namespace testutil {

using padicnn::BigInt;
using padicnn::BigRational;

/// Uniform BigInt in [0, bound) by rejection on the bit length.
inline BigInt random_below(std::mt19937_64& rng, const BigInt& bound) {
    if (bound <= 1) return BigInt(0);
    const unsigned bits = boost::multiprecision::msb(BigInt(bound - 1)) + 1;
    const BigInt mask = (BigInt(1) << bits) - 1;
    for (;;) {
        BigInt r = 0;
        for (unsigned c = 0; c < bits; c += 64) {
            r <<= 64;
            r |= BigInt(rng());
        }
        r &= mask;
        if (r < bound) return r;
    }
}

/// Random unit mod p^e.
inline BigInt random_unit(std::mt19937_64& rng, const BigInt& p, const BigInt& modulus) {
    for (;;) {
        BigInt r = random_below(rng, modulus);
        if (r % p != 0) return r;
    }
}

/// Random character base 1 + p*t mod p^E.
inline BigInt random_base(std::mt19937_64& rng, const padicnn::PadicContext& ctx) {
    const BigInt t = random_below(rng, ctx.pow(ctx.precision() - 1));
    return 1 + ctx.prime() * t;
}

/// Repeated-multiplication exponentiation; oracle for small exponents.
inline BigInt naive_pow_mod(const BigInt& base, const BigInt& exponent, const BigInt& modulus) {
    BigInt y = 1 % modulus;
    for (BigInt i = 0; i < exponent; ++i) y = y * base % modulus;
    return y;
}

/// Reference extended-Euclid inverse, independent of the library path.
inline BigInt ref_inverse(const BigInt& x, const BigInt& m) {
    BigInt r0 = m, r1 = x % m, s0 = 0, s1 = 1;
    while (r1 != 0) {
        const BigInt q = r0 / r1;
        BigInt r2 = r0 - q * r1;
        BigInt s2 = s0 - q * s1;
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
    }
    BigInt out = s0 % m;
    if (out < 0) out += m;
    return out;
}

/// Residue of an exact rational with p-coprime denominator.
inline BigInt rational_residue(const BigRational& r, const BigInt& p, const BigInt& modulus) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    num %= modulus;
    if (num < 0) num += modulus;
    if (den % p == 0) throw std::invalid_argument("rational_residue: denominator not coprime");
    return num * ref_inverse(den % modulus, modulus) % modulus;
}

}  // namespace testutil
