#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "padicnn/polysys.hpp"

namespace padicnn {

struct DdpOptions {
    /// Hard cap on the number of retained witnesses per level; exceeding it
    /// raises FrontierOverflow rather than truncating silently.
    std::size_t frontier_budget = 1'000'000;
    /// Guard on the p^L digit vectors enumerated per witness.
    std::size_t digit_space_guard = 16'777'216;
    /// Test hook: called with each completed level's sorted frontier.
    std::function<void(int level, const std::vector<std::vector<BigInt>>&)> on_level;
};

struct DdpReport {
    int e_star = 0;    // largest e (<= cap) with a common zero mod p^e
    bool hit_cap = false;
    /// Entry e is the number of common zeros mod p^e, for every computed
    /// level; a trailing 0 records the failed extension when not at cap.
    std::vector<std::size_t> zero_count_per_level;
    /// Lexicographically smallest common zero at level e_star.
    std::optional<std::vector<BigInt>> witness;
};

class FrontierOverflow : public std::runtime_error {
public:
    FrontierOverflow(int completed_level_in, std::vector<std::size_t> counts)
        : std::runtime_error("ddp: frontier exceeded the memory budget"),
          completed_level(completed_level_in),
          zero_count_per_level(std::move(counts)) {}
    int completed_level;
    std::vector<std::size_t> zero_count_per_level;
};

/// Digit dynamic programming: lift the set of common zeros level by level
/// from mod p^e to mod p^(e+1), stopping at the first infeasible level or at
/// the cap (always run capped; an exact common zero in Zp would loop forever).
DdpReport ddp_max_exponent(const std::vector<IntPolynomial>& system, const BigInt& p,
                           int var_count, int cap, const DdpOptions& options = {});

enum class NormKind { linf, l1 };

struct LossValue {
    NormKind kind = NormKind::linf;
    /// All residuals vanish mod p^E: indistinguishable from an exact fit.
    bool zero_within_precision = false;
    /// linf only: loss = p^(-exponent) = p^(-e_star).
    int exponent = 0;
    /// Exact value under |p| = p^(-1); residuals that vanish within
    /// precision contribute 0.
    BigRational value;
};

struct LinfMinimum {
    LossValue loss;
    DdpReport report;
};

/// Exact l-infinity minimum of ||(f_i(z)) mod p^E|| over z, via the maximal
/// feasible exponent.
LinfMinimum linf_training_minimum(const std::vector<IntPolynomial>& system, const BigInt& p,
                                  int var_count, int precision, const DdpOptions& = {});

struct BruteForceOptions {
    BigInt enumeration_budget = 4'000'000;
};

class EnumerationBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BruteForceResult {
    LossValue loss;
    /// All minimizers, in lexicographic order.
    std::vector<std::vector<BigInt>> minimizers;
};

/// Independent oracle: enumerate all z in [0, p^E)^L and minimize exactly.
BruteForceResult brute_force_minimum(const std::vector<IntPolynomial>& system, const BigInt& p,
                                     int var_count, int precision, NormKind norm,
                                     const BruteForceOptions& = {});

struct TrainResult {
    CharacterNetwork network;
    LossValue loss;
    DdpReport report;
};

/// Compile the residual system, minimize (DDP for l-infinity, exhaustive
/// search for l1), and decode the witness back into (A, b, C).
TrainResult train(const Character& chi, const Dataset& data, int hidden_dim, NormKind norm,
                  const DdpOptions& = {}, const BruteForceOptions& = {});

}  // namespace padicnn
