#include "padicnn/network.hpp"

#include <stdexcept>
#include <utility>

namespace padicnn {

namespace {

void canonicalize_matrix(std::vector<std::vector<BigInt>>& m, const BigInt& modulus) {
    for (auto& row : m)
        for (auto& v : row) v = mod_canonical(v, modulus);
}

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

void require_compatible(const CharacterNetwork& g0, const CharacterNetwork& g1,
                        const char* what) {
    require(g0.ctx->same(*g1.ctx), what);
    require(g0.denom_exponent == g1.denom_exponent, what);
    require(g0.chi == g1.chi, what);
    require(g0.input_dim == g1.input_dim, what);
}

}  // namespace

CharacterNetwork::CharacterNetwork(ContextPtr ctx_in, int denom_exponent_in, Character chi_in,
                                   int input_dim_in, std::vector<std::vector<BigInt>> weights_in,
                                   std::vector<BigInt> bias_in,
                                   std::vector<std::vector<BigInt>> coeff_in)
    : ctx(std::move(ctx_in)),
      denom_exponent(denom_exponent_in),
      chi(std::move(chi_in)),
      input_dim(input_dim_in),
      weights(std::move(weights_in)),
      bias(std::move(bias_in)),
      coeff(std::move(coeff_in)) {
    require(denom_exponent >= 0, "CharacterNetwork: F must be >= 0");
    require(input_dim >= 0, "CharacterNetwork: N must be >= 0");
    hidden_dim = static_cast<int>(weights.size());
    require(hidden_dim >= 1, "CharacterNetwork: D must be >= 1");
    for (const auto& row : weights)
        require(static_cast<int>(row.size()) == input_dim, "CharacterNetwork: A must be D x N");
    require(static_cast<int>(bias.size()) == hidden_dim, "CharacterNetwork: b must have length D");
    output_dim = static_cast<int>(coeff.size());
    require(output_dim >= 1, "CharacterNetwork: M must be >= 1");
    for (const auto& row : coeff)
        require(static_cast<int>(row.size()) == hidden_dim, "CharacterNetwork: C must be M x D");

    require(chi.context()->prime() == ctx->prime(),
            "CharacterNetwork: character prime mismatch");
    require(chi.context()->precision() == working_precision(),
            "CharacterNetwork: character must live at precision E + F");

    const BigInt affine_modulus = ctx->pow_extended(std::max(0, working_precision() - 1));
    const BigInt coeff_modulus = ctx->pow_extended(working_precision());
    canonicalize_matrix(weights, affine_modulus);
    for (auto& v : bias) v = mod_canonical(v, affine_modulus);
    canonicalize_matrix(coeff, coeff_modulus);
}

void Dataset::validate() const {
    if (denom_exponent < 0) throw std::invalid_argument("Dataset: F must be >= 0");
    const BigInt x_modulus =
        ctx->pow_extended(std::max(0, ctx->precision() + denom_exponent - 1));
    for (const auto& s : samples) {
        if (static_cast<int>(s.x.size()) != input_dim)
            throw std::invalid_argument("Dataset: sample x has wrong length");
        if (static_cast<int>(s.y.size()) != output_dim)
            throw std::invalid_argument("Dataset: sample y has wrong length");
        for (const auto& v : s.x)
            if (v < 0 || v >= x_modulus)
                throw std::invalid_argument("Dataset: x entry not canonical mod p^(E+F-1)");
        for (const auto& v : s.y) {
            if (!v.context()->same(*ctx) || v.denom_exponent() != denom_exponent)
                throw std::invalid_argument("Dataset: y entry on wrong context or F");
        }
    }
}

std::vector<ScaledPadic> forward(const CharacterNetwork& net, std::span<const BigInt> x,
                                 EvalMethod method) {
    if (static_cast<int>(x.size()) != net.input_dim)
        throw std::invalid_argument("forward: input length mismatch");
    const int W = net.working_precision();
    const BigInt affine_modulus = net.ctx->pow_extended(std::max(0, W - 1));
    const BigInt value_modulus = net.ctx->pow_extended(W);

    std::vector<BigInt> hidden(static_cast<std::size_t>(net.hidden_dim));
    for (int j = 0; j < net.hidden_dim; ++j) {
        BigInt w = net.bias[static_cast<std::size_t>(j)];
        for (int k = 0; k < net.input_dim; ++k)
            w += net.weights[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] *
                 x[static_cast<std::size_t>(k)];
        w = mod_canonical(w, affine_modulus);
        hidden[static_cast<std::size_t>(j)] = eval_character(net.chi, w, method);
    }

    std::vector<ScaledPadic> out;
    out.reserve(static_cast<std::size_t>(net.output_dim));
    for (int r = 0; r < net.output_dim; ++r) {
        BigInt acc = 0;
        for (int j = 0; j < net.hidden_dim; ++j)
            acc += net.coeff[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] *
                   hidden[static_cast<std::size_t>(j)];
        out.emplace_back(net.ctx, net.denom_exponent, mod_canonical(acc, value_modulus));
    }
    return out;
}

CharacterNetwork net_add(const CharacterNetwork& g0, const CharacterNetwork& g1) {
    require_compatible(g0, g1, "net_add: incompatible networks");
    require(g0.output_dim == g1.output_dim, "net_add: output dimension mismatch");

    std::vector<std::vector<BigInt>> weights = g0.weights;
    weights.insert(weights.end(), g1.weights.begin(), g1.weights.end());
    std::vector<BigInt> bias = g0.bias;
    bias.insert(bias.end(), g1.bias.begin(), g1.bias.end());

    std::vector<std::vector<BigInt>> coeff(static_cast<std::size_t>(g0.output_dim));
    for (int r = 0; r < g0.output_dim; ++r) {
        coeff[static_cast<std::size_t>(r)] = g0.coeff[static_cast<std::size_t>(r)];
        auto& row = coeff[static_cast<std::size_t>(r)];
        const auto& other = g1.coeff[static_cast<std::size_t>(r)];
        row.insert(row.end(), other.begin(), other.end());
    }
    return CharacterNetwork(g0.ctx, g0.denom_exponent, g0.chi, g0.input_dim, std::move(weights),
                            std::move(bias), std::move(coeff));
}

CharacterNetwork net_multiply(const CharacterNetwork& g0, const CharacterNetwork& g1) {
    require_compatible(g0, g1, "net_multiply: incompatible networks");
    require(g0.output_dim == 1 && g1.output_dim == 1,
            "net_multiply: both networks must have M = 1");
    const int E = g0.ctx->precision();
    const int F = g0.denom_exponent;
    require(E - F >= 1, "net_multiply: product certifies no digits (E <= F)");

    const int d0 = g0.hidden_dim;
    const int d1 = g1.hidden_dim;
    const BigInt coeff_modulus = g0.ctx->pow_extended(E + F);

    std::vector<std::vector<BigInt>> weights;
    std::vector<BigInt> bias;
    std::vector<BigInt> coeff_row;
    weights.reserve(static_cast<std::size_t>(d0) * d1);
    for (int j = 0; j < d0 * d1; ++j) {
        const std::size_t j0 = static_cast<std::size_t>(j % d0);
        const std::size_t j1 = static_cast<std::size_t>(j / d0);
        std::vector<BigInt> row(static_cast<std::size_t>(g0.input_dim));
        for (int k = 0; k < g0.input_dim; ++k)
            row[static_cast<std::size_t>(k)] = g0.weights[j0][static_cast<std::size_t>(k)] +
                                               g1.weights[j1][static_cast<std::size_t>(k)];
        weights.push_back(std::move(row));
        bias.push_back(g0.bias[j0] + g1.bias[j1]);
        coeff_row.push_back(g0.coeff[0][j0] * g1.coeff[0][j1] % coeff_modulus);
    }

    auto product_ctx = PadicContext::create(g0.ctx->prime(), E - F);
    return CharacterNetwork(std::move(product_ctx), 2 * F, g0.chi, g0.input_dim,
                            std::move(weights), std::move(bias), {std::move(coeff_row)});
}

CharacterNetwork net_stack(std::span<const CharacterNetwork> nets) {
    if (nets.empty()) throw std::invalid_argument("net_stack: need at least one network");
    const CharacterNetwork& first = nets.front();
    int total_hidden = 0;
    for (const auto& g : nets) {
        require_compatible(first, g, "net_stack: incompatible networks");
        require(g.output_dim == 1, "net_stack: constituents must have M = 1");
        total_hidden += g.hidden_dim;
    }

    std::vector<std::vector<BigInt>> weights;
    std::vector<BigInt> bias;
    weights.reserve(static_cast<std::size_t>(total_hidden));
    std::vector<std::vector<BigInt>> coeff(
        nets.size(), std::vector<BigInt>(static_cast<std::size_t>(total_hidden), 0));
    int offset = 0;
    for (std::size_t m = 0; m < nets.size(); ++m) {
        const auto& g = nets[m];
        weights.insert(weights.end(), g.weights.begin(), g.weights.end());
        bias.insert(bias.end(), g.bias.begin(), g.bias.end());
        for (int j = 0; j < g.hidden_dim; ++j)
            coeff[m][static_cast<std::size_t>(offset + j)] = g.coeff[0][static_cast<std::size_t>(j)];
        offset += g.hidden_dim;
    }
    return CharacterNetwork(first.ctx, first.denom_exponent, first.chi, first.input_dim,
                            std::move(weights), std::move(bias), std::move(coeff));
}

CharacterNetwork coordinate_probe(ContextPtr ctx, const Character& chi, int input_dim,
                                  int coordinate) {
    if (coordinate < 0 || coordinate >= input_dim)
        throw std::out_of_range("coordinate_probe: coordinate index out of range");
    std::vector<std::vector<BigInt>> weights(1, std::vector<BigInt>(
                                                    static_cast<std::size_t>(input_dim), 0));
    weights[0][static_cast<std::size_t>(coordinate)] = 1;
    return CharacterNetwork(std::move(ctx), 0, chi, input_dim, std::move(weights), {BigInt(0)},
                            {{BigInt(1)}});
}

}  // namespace padicnn
