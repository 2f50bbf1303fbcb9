#pragma once

#include <span>
#include <vector>

#include "padicnn/characters.hpp"

namespace padicnn {

/// Single-hidden-layer character network x -> C chi(Ax + b) over Zp^N.
///
/// ctx has precision E (outputs are certified mod p^E); chi lives on a
/// context of precision E + F (the working precision of the hidden layer).
/// A and b entries are canonical mod p^(E+F-1), C numerators mod p^(E+F)
/// with denominator exponent F. Immutable after construction; forward is
/// pure, so batch evaluation may run in parallel.
struct CharacterNetwork {
    CharacterNetwork(ContextPtr ctx, int denom_exponent, Character chi, int input_dim,
                     std::vector<std::vector<BigInt>> weights, std::vector<BigInt> bias,
                     std::vector<std::vector<BigInt>> coeff_numerators);

    ContextPtr ctx;       // precision E
    int denom_exponent;   // F
    Character chi;        // at precision E + F
    int input_dim;        // N
    int hidden_dim;       // D
    int output_dim;       // M
    std::vector<std::vector<BigInt>> weights;  // D x N
    std::vector<BigInt> bias;                  // D
    std::vector<std::vector<BigInt>> coeff;    // M x D numerators of p^(-F) C

    int working_precision() const { return ctx->precision() + denom_exponent; }
};

/// Samples (x_i, y_i): x entries canonical mod p^(E+F-1), y entries
/// ScaledPadic with denominator exponent F on the same context.
struct Dataset {
    ContextPtr ctx;      // precision E
    int denom_exponent;  // F
    int input_dim;       // N
    int output_dim;      // M

    struct Sample {
        std::vector<BigInt> x;
        std::vector<ScaledPadic> y;
    };
    std::vector<Sample> samples;

    void validate() const;
};

/// Forward map: w = Ax + b mod p^(E+F-1), chi applied entrywise mod
/// p^(E+F), then C; each output certified mod p^E.
std::vector<ScaledPadic> forward(const CharacterNetwork& net, std::span<const BigInt> x,
                                 EvalMethod method = EvalMethod::binary);

/// Pointwise sum: vertical stack of A, concatenated b, horizontal C.
CharacterNetwork net_add(const CharacterNetwork& g0, const CharacterNetwork& g1);

/// Pointwise product for single-output networks: hidden unit j of the
/// result combines units (j mod D0) and (j / D0), rows and biases added,
/// coefficients multiplied. Precision drops to E - F and the denominator
/// exponent doubles; requires E > F.
CharacterNetwork net_multiply(const CharacterNetwork& g0, const CharacterNetwork& g1);

/// Output stacking of single-output networks: block-diagonal C.
CharacterNetwork net_stack(std::span<const CharacterNetwork> nets);

/// The network computing chi(x_i): one hidden unit wired to coordinate i.
CharacterNetwork coordinate_probe(ContextPtr ctx, const Character& chi, int input_dim,
                                  int coordinate);

}  // namespace padicnn
