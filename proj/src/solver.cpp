#include "padicnn/solver.hpp"

#include <algorithm>
#include <cassert>

namespace padicnn {

namespace {

using Witness = std::vector<BigInt>;

// Digit odometer over [0, p)^L, last index fastest (lexicographic order).
bool next_digits(std::vector<long long>& d, long long p) {
    for (std::size_t i = d.size(); i-- > 0;) {
        if (++d[i] < p) return true;
        d[i] = 0;
    }
    return false;
}

bool next_digits_big(std::vector<BigInt>& d, const BigInt& p) {
    for (std::size_t i = d.size(); i-- > 0;) {
        if (++d[i] < p) return true;
        d[i] = 0;
    }
    return false;
}

std::size_t checked_digit_space(const BigInt& p, int var_count, std::size_t guard) {
    BigInt total = 1;
    for (int i = 0; i < var_count; ++i) {
        total *= p;
        if (total > guard)
            throw std::invalid_argument("ddp: digit space p^L exceeds the enumeration guard");
    }
    return static_cast<std::size_t>(total);
}

}  // namespace

DdpReport ddp_max_exponent(const std::vector<IntPolynomial>& system, const BigInt& p,
                           int var_count, int cap, const DdpOptions& options) {
    if (system.empty()) throw std::invalid_argument("ddp: system must be nonempty");
    if (var_count < 1) throw std::invalid_argument("ddp: need at least one variable");
    if (cap < 0) throw std::invalid_argument("ddp: cap must be >= 0");
    for (const auto& f : system)
        if (f.var_count() != var_count)
            throw std::invalid_argument("ddp: polynomial variable count mismatch");

    DdpReport report;
    report.zero_count_per_level.push_back(1);  // the zero vector mod p^0
    std::vector<Witness> frontier{Witness(static_cast<std::size_t>(var_count), BigInt(0))};
    if (cap == 0) {
        report.e_star = 0;
        report.hit_cap = true;
        report.witness = frontier.front();
        return report;
    }

    checked_digit_space(p, var_count, options.digit_space_guard);
    const bool small_prime = p < 32768;
    const long long p_small = small_prime ? static_cast<long long>(p) : 0;

    std::vector<IntPolynomial> reduced = system;
    for (auto& f : reduced) f.reduce_coefficients(boost::multiprecision::pow(p, cap));
    std::vector<std::vector<IntPolynomial>> partials;
    partials.reserve(reduced.size());
    for (const auto& f : reduced) {
        std::vector<IntPolynomial> row;
        row.reserve(static_cast<std::size_t>(var_count));
        for (int l = 0; l < var_count; ++l) {
            IntPolynomial d = f.partial_derivative(l);
            d.reduce_coefficients(p);
            row.push_back(std::move(d));
        }
        partials.push_back(std::move(row));
    }

    for (int level = 0; level < cap; ++level) {
        const BigInt step = boost::multiprecision::pow(p, level);
        const BigInt next_modulus = step * p;
        std::vector<Witness> next;

        for (const Witness& z : frontier) {
            if (level == 0) {
                // No expansion point yet: test every digit vector directly.
                std::vector<BigInt> digits(static_cast<std::size_t>(var_count), BigInt(0));
                do {
                    bool zero = true;
                    for (const auto& f : reduced)
                        if (poly_eval_mod(f, digits, p) != 0) {
                            zero = false;
                            break;
                        }
                    if (zero) {
                        if (next.size() >= options.frontier_budget)
                            throw FrontierOverflow(level, report.zero_count_per_level);
                        next.push_back(digits);
                    }
                } while (next_digits_big(digits, p));
                continue;
            }

            // f(z + p^e d) = f(z) + p^e grad_f(z).d  (mod p^(e+1), exact for
            // e >= 1 since the second-order Hasse term carries p^(2e)).
            std::vector<BigInt> residual_digit(reduced.size());
            for (std::size_t i = 0; i < reduced.size(); ++i) {
                const BigInt value = poly_eval_mod(reduced[i], z, next_modulus);
                if (value % step != 0)
                    throw std::logic_error("ddp: retained witness fails the previous level");
                residual_digit[i] = value / step;  // in [0, p)
            }
            std::vector<BigInt> base_mod_p(z.size());
            for (std::size_t l = 0; l < z.size(); ++l) base_mod_p[l] = z[l] % p;
            std::vector<std::vector<BigInt>> gradient(reduced.size());
            for (std::size_t i = 0; i < reduced.size(); ++i) {
                gradient[i].resize(static_cast<std::size_t>(var_count));
                for (int l = 0; l < var_count; ++l)
                    gradient[i][static_cast<std::size_t>(l)] =
                        poly_eval_mod(partials[i][static_cast<std::size_t>(l)], base_mod_p, p);
            }

            auto emit = [&](const auto& digits) {
                if (next.size() >= options.frontier_budget)
                    throw FrontierOverflow(level, report.zero_count_per_level);
                Witness w(z);
                for (std::size_t l = 0; l < w.size(); ++l) w[l] += step * digits[l];
                next.push_back(std::move(w));
            };

            if (small_prime) {
                std::vector<long long> r(reduced.size());
                std::vector<std::vector<long long>> g(reduced.size());
                for (std::size_t i = 0; i < reduced.size(); ++i) {
                    r[i] = static_cast<long long>(residual_digit[i]);
                    g[i].resize(static_cast<std::size_t>(var_count));
                    for (int l = 0; l < var_count; ++l)
                        g[i][static_cast<std::size_t>(l)] =
                            static_cast<long long>(gradient[i][static_cast<std::size_t>(l)]);
                }
                std::vector<long long> digits(static_cast<std::size_t>(var_count), 0);
                do {
                    bool zero = true;
                    for (std::size_t i = 0; i < reduced.size(); ++i) {
                        long long s = r[i];
                        for (std::size_t l = 0; l < digits.size(); ++l) s += g[i][l] * digits[l];
                        if (s % p_small != 0) {
                            zero = false;
                            break;
                        }
                    }
                    if (zero) emit(digits);
                } while (next_digits(digits, p_small));
            } else {
                std::vector<BigInt> digits(static_cast<std::size_t>(var_count), BigInt(0));
                do {
                    bool zero = true;
                    for (std::size_t i = 0; i < reduced.size(); ++i) {
                        BigInt s = residual_digit[i];
                        for (std::size_t l = 0; l < digits.size(); ++l)
                            s += gradient[i][l] * digits[l];
                        if (s % p != 0) {
                            zero = false;
                            break;
                        }
                    }
                    if (zero) emit(digits);
                } while (next_digits_big(digits, p));
            }
        }

        if (next.empty()) {
            report.e_star = level;
            report.zero_count_per_level.push_back(0);
            report.witness = frontier.front();
            return report;
        }
        std::sort(next.begin(), next.end());
        assert(std::adjacent_find(next.begin(), next.end()) == next.end());
        report.zero_count_per_level.push_back(next.size());
        frontier = std::move(next);
        if (options.on_level) options.on_level(level + 1, frontier);
    }

    report.e_star = cap;
    report.hit_cap = true;
    report.witness = frontier.front();
    return report;
}

LinfMinimum linf_training_minimum(const std::vector<IntPolynomial>& system, const BigInt& p,
                                  int var_count, int precision, const DdpOptions& options) {
    LinfMinimum out;
    out.report = ddp_max_exponent(system, p, var_count, precision, options);
    out.loss.kind = NormKind::linf;
    out.loss.exponent = out.report.e_star;
    if (out.report.hit_cap) {
        out.loss.zero_within_precision = true;
        out.loss.value = 0;
    } else {
        out.loss.zero_within_precision = false;
        out.loss.value =
            BigRational(1, boost::multiprecision::pow(p, out.report.e_star));
    }
    return out;
}

BruteForceResult brute_force_minimum(const std::vector<IntPolynomial>& system, const BigInt& p,
                                     int var_count, int precision, NormKind norm,
                                     const BruteForceOptions& options) {
    if (system.empty()) throw std::invalid_argument("brute_force_minimum: empty system");
    if (var_count < 1) throw std::invalid_argument("brute_force_minimum: need variables");
    if (precision < 1) throw std::invalid_argument("brute_force_minimum: precision must be >= 1");

    const BigInt box = boost::multiprecision::pow(p, precision);
    BigInt total = 1;
    for (int i = 0; i < var_count; ++i) {
        total *= box;
        if (total > options.enumeration_budget)
            throw EnumerationBudgetExceeded("brute_force_minimum: p^(E L) exceeds the budget");
    }

    BruteForceResult out;
    out.loss.kind = norm;
    int best_exponent = -1;       // linf: min residual valuation, maximized
    BigRational best_value;       // l1: minimized
    bool first = true;

    std::vector<BigInt> z(static_cast<std::size_t>(var_count), BigInt(0));
    do {
        int min_valuation = precision;
        BigRational sum = 0;
        for (const auto& f : system) {
            const BigInt r = poly_eval_mod(f, z, box);
            int v = precision;
            if (r != 0) v = valuative_decomposition(p, r).valuation;
            min_valuation = std::min(min_valuation, v);
            if (norm == NormKind::l1 && v < precision)
                sum += BigRational(1, boost::multiprecision::pow(p, v));
        }
        if (norm == NormKind::linf) {
            if (min_valuation > best_exponent) {
                best_exponent = min_valuation;
                out.minimizers.clear();
            }
            if (min_valuation == best_exponent) out.minimizers.push_back(z);
        } else {
            if (first || sum < best_value) {
                best_value = sum;
                out.minimizers.clear();
                first = false;
            }
            if (sum == best_value) out.minimizers.push_back(z);
        }
    } while (next_digits_big(z, box));

    if (norm == NormKind::linf) {
        out.loss.exponent = best_exponent;
        out.loss.zero_within_precision = best_exponent >= precision;
        out.loss.value = out.loss.zero_within_precision
                             ? BigRational(0)
                             : BigRational(1, boost::multiprecision::pow(p, best_exponent));
    } else {
        out.loss.value = best_value;
        out.loss.zero_within_precision = best_value == 0;
        out.loss.exponent = 0;
    }
    return out;
}

TrainResult train(const Character& chi, const Dataset& data, int hidden_dim, NormKind norm,
                  const DdpOptions& ddp_options, const BruteForceOptions& brute_options) {
    const CompiledSystem system = compile_residual(chi, data, hidden_dim);
    const BigInt& p = data.ctx->prime();
    const int effective = system.effective_precision();

    LossValue loss;
    DdpReport report;
    std::vector<BigInt> witness;
    if (norm == NormKind::linf) {
        LinfMinimum minimum =
            linf_training_minimum(system.polys, p, system.var_count, effective, ddp_options);
        loss = minimum.loss;
        report = std::move(minimum.report);
        witness = *report.witness;
    } else {
        report = ddp_max_exponent(system.polys, p, system.var_count, effective, ddp_options);
        BruteForceResult brute = brute_force_minimum(system.polys, p, system.var_count,
                                                     effective, NormKind::l1, brute_options);
        loss = brute.loss;
        witness = brute.minimizers.front();
    }

    const int N = system.input_dim;
    const int D = system.hidden_dim;
    const int M = system.output_dim;
    std::vector<std::vector<BigInt>> weights(static_cast<std::size_t>(D),
                                             std::vector<BigInt>(static_cast<std::size_t>(N)));
    std::vector<BigInt> bias(static_cast<std::size_t>(D));
    std::vector<std::vector<BigInt>> coeff(static_cast<std::size_t>(M),
                                           std::vector<BigInt>(static_cast<std::size_t>(D)));
    for (int j = 0; j < D; ++j) {
        for (int k = 0; k < N; ++k)
            weights[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
                witness[static_cast<std::size_t>(weight_variable(D, N, j, k))];
        bias[static_cast<std::size_t>(j)] =
            witness[static_cast<std::size_t>(bias_variable(D, N, j))];
    }
    for (int r = 0; r < M; ++r)
        for (int j = 0; j < D; ++j)
            coeff[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
                witness[static_cast<std::size_t>(coeff_variable(D, N, r, j))];

    CharacterNetwork network(data.ctx, data.denom_exponent, chi, N, std::move(weights),
                             std::move(bias), std::move(coeff));
    return TrainResult{std::move(network), std::move(loss), std::move(report)};
}

}  // namespace padicnn
