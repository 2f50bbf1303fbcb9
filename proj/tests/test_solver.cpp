#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "padicnn/serialize.hpp"
#include "padicnn/solver.hpp"
#include "test_util.hpp"

using namespace padicnn;
using testutil::random_below;

namespace {

IntPolynomial univariate(const std::vector<BigInt>& coeffs) {
    IntPolynomial f(1);
    for (std::size_t d = 0; d < coeffs.size(); ++d) {
        if (coeffs[d] == 0) continue;
        if (d == 0)
            f.add_term(Monomial{}, coeffs[d]);
        else
            f.add_term(Monomial::variable(0, static_cast<int>(d)), coeffs[d]);
    }
    return f;
}

IntPolynomial random_poly(std::mt19937_64& rng, int var_count) {
    IntPolynomial f(var_count);
    const int terms = 1 + static_cast<int>(rng() % 4);
    for (int t = 0; t < terms; ++t) {
        Monomial m;
        int degree_left = 2;
        for (int v = 0; v < var_count; ++v) {
            const int e = static_cast<int>(rng() % (degree_left + 1));
            if (e > 0) m = m * Monomial::variable(v, e);
            degree_left -= e;
        }
        f.add_term(m, random_below(rng, 41) - 20);
    }
    return f;
}

// Exhaustive maximal feasible exponent, independent of the DDP path.
int brute_force_e_star(const std::vector<IntPolynomial>& system, const BigInt& p, int L,
                       int cap) {
    const BruteForceResult r =
        brute_force_minimum(system, p, L, cap, NormKind::linf, BruteForceOptions{BigInt(1) << 40});
    return r.loss.exponent;
}

}  // namespace

TEST_CASE("ddp fixed examples") {
    const IntPolynomial z2_minus_2 = univariate({BigInt(-2), BigInt(0), BigInt(1)});
    const DdpReport a = ddp_max_exponent({z2_minus_2}, 3, 1, 5);
    CHECK(a.e_star == 0);
    CHECK_FALSE(a.hit_cap);
    CHECK(a.zero_count_per_level == std::vector<std::size_t>{1, 0});
    REQUIRE(a.witness.has_value());
    CHECK(*a.witness == std::vector<BigInt>{BigInt(0)});

    const IntPolynomial z2_minus_3 = univariate({BigInt(-3), BigInt(0), BigInt(1)});
    const DdpReport b = ddp_max_exponent({z2_minus_3}, 3, 1, 5);
    CHECK(b.e_star == 1);
    CHECK_FALSE(b.hit_cap);
    CHECK(b.zero_count_per_level == std::vector<std::size_t>{1, 1, 0});
    CHECK(*b.witness == std::vector<BigInt>{BigInt(0)});

    const IntPolynomial z_minus_1 = univariate({BigInt(-1), BigInt(1)});
    const DdpReport c = ddp_max_exponent({z_minus_1}, 2, 1, 4);
    CHECK(c.e_star == 4);
    CHECK(c.hit_cap);
    CHECK(c.zero_count_per_level == std::vector<std::size_t>{1, 1, 1, 1, 1});
    CHECK(*c.witness == std::vector<BigInt>{BigInt(1)});
}

TEST_CASE("ddp nestedness, ordering, and dedup per level") {
    std::mt19937_64 rng(5001);
    for (int trial = 0; trial < 40; ++trial) {
        const int p = (trial % 2 == 0) ? 2 : 3;
        const int L = 1 + static_cast<int>(rng() % 2);
        std::vector<IntPolynomial> system;
        for (int i = 0; i < 1 + static_cast<int>(rng() % 2); ++i)
            system.push_back(random_poly(rng, L));

        std::vector<std::vector<BigInt>> previous{
            std::vector<BigInt>(static_cast<std::size_t>(L), BigInt(0))};
        int previous_level = 0;
        DdpOptions options;
        options.on_level = [&](int level, const std::vector<std::vector<BigInt>>& frontier) {
            CHECK(level == previous_level + 1);
            CHECK(std::is_sorted(frontier.begin(), frontier.end()));
            CHECK(std::adjacent_find(frontier.begin(), frontier.end()) == frontier.end());
            const BigInt step = boost::multiprecision::pow(BigInt(p), level - 1);
            for (const auto& w : frontier) {
                std::vector<BigInt> reduced(w.size());
                for (std::size_t i = 0; i < w.size(); ++i) reduced[i] = w[i] % step;
                CHECK(std::binary_search(previous.begin(), previous.end(), reduced));
            }
            previous = frontier;
            previous_level = level;
        };
        ddp_max_exponent(system, p, L, 4, options);
    }
}

TEST_CASE("ddp equals exhaustive search on random systems") {
    std::mt19937_64 rng(5002);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = (rng() % 2 == 0) ? 2 : 3;
        const int L = 1 + static_cast<int>(rng() % 2);
        // Keep p^(E L) <= 3^8.
        const int E = (L == 2) ? (p == 2 ? 5 : 4) : (p == 2 ? 8 : 8);
        std::vector<IntPolynomial> system;
        for (int i = 0; i < 1 + static_cast<int>(rng() % 3); ++i)
            system.push_back(random_poly(rng, L));

        const DdpReport report = ddp_max_exponent(system, p, L, E);
        CHECK(report.e_star == brute_force_e_star(system, p, L, E));

        // Witness satisfies every polynomial mod p^e_star.
        if (report.e_star > 0) {
            const BigInt modulus = boost::multiprecision::pow(BigInt(p), report.e_star);
            for (const auto& f : system) CHECK(poly_eval_mod(*&f, *report.witness, modulus) == 0);
        }

        // Feasible exponents are downward closed: direct enumeration at each
        // level at or below e_star finds a zero.
        for (int e = 1; e <= report.e_star; ++e) {
            const BigInt box = boost::multiprecision::pow(BigInt(p), e);
            bool found = false;
            std::vector<BigInt> z(static_cast<std::size_t>(L), BigInt(0));
            for (;;) {
                bool zero = true;
                for (const auto& f : system)
                    if (poly_eval_mod(f, z, box) != 0) {
                        zero = false;
                        break;
                    }
                if (zero) {
                    found = true;
                    break;
                }
                std::size_t i = z.size();
                bool wrapped = true;
                while (i-- > 0) {
                    if (++z[i] < box) {
                        wrapped = false;
                        break;
                    }
                    z[i] = 0;
                }
                if (wrapped) break;
            }
            CHECK(found);
        }
    }
}

TEST_CASE("ddp frontier budget raises a typed overflow") {
    // The zero polynomial keeps every witness alive: frontier p^(eL).
    IntPolynomial zero(2);
    DdpOptions tight;
    tight.frontier_budget = 10;
    try {
        ddp_max_exponent({zero}, 3, 2, 4, tight);
        FAIL("expected FrontierOverflow");
    } catch (const FrontierOverflow& overflow) {
        CHECK(overflow.completed_level >= 0);
        CHECK_FALSE(overflow.zero_count_per_level.empty());
    }
}

TEST_CASE("ddp digit space guard") {
    IntPolynomial zero(40);
    CHECK_THROWS_AS(ddp_max_exponent({zero}, 3, 40, 2), std::invalid_argument);
}

TEST_CASE("linf training minimum examples") {
    const IntPolynomial z2_minus_3 = univariate({BigInt(-3), BigInt(0), BigInt(1)});
    const LinfMinimum a = linf_training_minimum({z2_minus_3}, 3, 1, 4);
    CHECK_FALSE(a.loss.zero_within_precision);
    CHECK(a.loss.exponent == 1);
    CHECK(a.loss.value == BigRational(1, 3));
    CHECK(*a.report.witness == std::vector<BigInt>{BigInt(0)});

    const IntPolynomial z_minus_1 = univariate({BigInt(-1), BigInt(1)});
    const LinfMinimum b = linf_training_minimum({z_minus_1}, 2, 1, 3);
    CHECK(b.loss.zero_within_precision);
    CHECK(b.loss.value == 0);
    CHECK(*b.report.witness == std::vector<BigInt>{BigInt(1)});

    const IntPolynomial unit = univariate({BigInt(1)});
    const LinfMinimum c = linf_training_minimum({unit}, 5, 1, 3);
    CHECK(c.loss.exponent == 0);
    CHECK(c.loss.value == 1);
}

TEST_CASE("brute force minimum in the l1 norm") {
    // Contradictory pair over F2: one equation always fails.
    const IntPolynomial z_minus_1 = univariate({BigInt(-1), BigInt(1)});
    const IntPolynomial z = univariate({BigInt(0), BigInt(1)});
    const BruteForceResult r = brute_force_minimum({z_minus_1, z}, 2, 1, 1, NormKind::l1);
    CHECK(r.loss.value == 1);
    CHECK_FALSE(r.loss.zero_within_precision);
    CHECK(r.minimizers.size() == 2);  // both points leave one equation unsatisfied

    // Degenerate zero system: loss zero, every point minimizes.
    IntPolynomial zero(1);
    const BruteForceResult d = brute_force_minimum({zero}, 3, 1, 2, NormKind::l1);
    CHECK(d.loss.zero_within_precision);
    CHECK(d.minimizers.size() == 9);
    CHECK(d.minimizers.front() == std::vector<BigInt>{BigInt(0)});

    CHECK_THROWS_AS(
        brute_force_minimum({zero}, 3, 1, 20, NormKind::l1, BruteForceOptions{1000}),
        EnumerationBudgetExceeded);
}

namespace {

struct TrainSetup {
    ContextPtr ctx;
    Character chi;
    int F;
};

TrainSetup train_setup(int p, int E, int F) {
    auto work = PadicContext::create(p, E + F);
    return TrainSetup{PadicContext::create(p, E), Character::exponential(work), F};
}

// Residual numerator valuations p^F (y - forward), capped at E + F.
std::vector<int> residual_valuations(const CharacterNetwork& net, const Dataset& data) {
    const int W = net.working_precision();
    const BigInt modulus = net.ctx->pow_extended(W);
    std::vector<int> out;
    for (const auto& sample : data.samples) {
        const auto predicted = forward(net, sample.x);
        for (std::size_t r = 0; r < predicted.size(); ++r) {
            const BigInt diff =
                mod_canonical(sample.y[r].numerator() - predicted[r].numerator(), modulus);
            out.push_back(diff == 0 ? W : valuative_decomposition(net.ctx->prime(), diff).valuation);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("train fits the trivial sample exactly") {
    auto s = train_setup(3, 2, 0);
    Dataset data{s.ctx, 0, 1, 1, {}};
    data.samples.push_back({{BigInt(0)}, {ScaledPadic(s.ctx, 0, 1)}});

    const TrainResult result = train(s.chi, data, 1, NormKind::linf);
    CHECK(result.loss.zero_within_precision);
    CHECK(forward(result.network, data.samples[0].x)[0].numerator() == 1);
}

TEST_CASE("train interpolates data generated by a known network") {
    std::mt19937_64 rng(5003);
    for (const int p : {2, 3}) {
        auto s = train_setup(p, 2, 0);
        const BigInt x_modulus = s.ctx->pow(1);
        const BigInt value_modulus = s.ctx->modulus();

        std::vector<std::vector<BigInt>> A{{random_below(rng, x_modulus)},
                                           {random_below(rng, x_modulus)}};
        std::vector<BigInt> b{random_below(rng, x_modulus), random_below(rng, x_modulus)};
        std::vector<std::vector<BigInt>> C{
            {random_below(rng, value_modulus), random_below(rng, value_modulus)}};
        const CharacterNetwork source(s.ctx, 0, s.chi, 1, A, b, C);

        Dataset data{s.ctx, 0, 1, 1, {}};
        for (const BigInt& x : {BigInt(0), BigInt(1)})
            data.samples.push_back({{x}, {forward(source, std::vector<BigInt>{x})[0]}});

        const TrainResult result = train(s.chi, data, 2, NormKind::linf);
        CHECK(result.loss.zero_within_precision);
        for (const int v : residual_valuations(result.network, data))
            CHECK(v >= s.ctx->precision());
    }
}

TEST_CASE("train on an inconsistent dataset matches brute force") {
    auto s = train_setup(3, 2, 0);
    Dataset data{s.ctx, 0, 1, 1, {}};
    data.samples.push_back({{BigInt(0)}, {ScaledPadic(s.ctx, 0, 1)}});
    data.samples.push_back({{BigInt(1)}, {ScaledPadic(s.ctx, 0, 4)}});
    data.samples.push_back({{BigInt(2)}, {ScaledPadic(s.ctx, 0, 4)}});

    const TrainResult result = train(s.chi, data, 1, NormKind::linf);
    CHECK_FALSE(result.loss.zero_within_precision);

    const CompiledSystem system = compile_residual(s.chi, data, 1);
    const BruteForceResult brute =
        brute_force_minimum(system.polys, 3, system.var_count, 2, NormKind::linf);
    CHECK(result.loss.exponent == brute.loss.exponent);
    CHECK(result.loss.value == brute.loss.value);
    CHECK(result.loss.value > 0);

    // The decoded network attains the loss: valuations >= e_star, with
    // equality somewhere.
    const auto valuations = residual_valuations(result.network, data);
    int minimum = system.effective_precision();
    for (const int v : valuations) {
        CHECK(v >= result.loss.exponent);
        minimum = std::min(minimum, v);
    }
    CHECK(minimum == result.loss.exponent);
}

TEST_CASE("train with denominators present") {
    std::mt19937_64 rng(5004);
    auto s = train_setup(2, 2, 1);
    const BigInt x_modulus = s.ctx->pow_extended(2);   // p^(E+F-1)
    const BigInt value_modulus = s.ctx->pow_extended(3);

    std::vector<std::vector<BigInt>> A{{random_below(rng, x_modulus)}};
    std::vector<BigInt> b{random_below(rng, x_modulus)};
    std::vector<std::vector<BigInt>> C{{random_below(rng, value_modulus)}};
    const CharacterNetwork source(s.ctx, 1, s.chi, 1, A, b, C);

    Dataset data{s.ctx, 1, 1, 1, {}};
    for (const BigInt& x : {BigInt(0), BigInt(2)})
        data.samples.push_back({{x}, {forward(source, std::vector<BigInt>{x})[0]}});

    const TrainResult result = train(s.chi, data, 1, NormKind::linf);
    CHECK(result.loss.zero_within_precision);
    for (const int v : residual_valuations(result.network, data))
        CHECK(v >= s.ctx->precision() + 1);  // numerator scale: >= E + F
}

TEST_CASE("train in the l1 norm on a tiny instance") {
    auto s = train_setup(2, 2, 0);
    Dataset data{s.ctx, 0, 1, 1, {}};
    data.samples.push_back({{BigInt(0)}, {ScaledPadic(s.ctx, 0, 1)}});
    data.samples.push_back({{BigInt(1)}, {ScaledPadic(s.ctx, 0, 3)}});

    const TrainResult result = train(s.chi, data, 1, NormKind::l1);
    CHECK(result.loss.kind == NormKind::l1);

    const CompiledSystem system = compile_residual(s.chi, data, 1);
    const BruteForceResult brute =
        brute_force_minimum(system.polys, 2, system.var_count, 2, NormKind::l1);
    CHECK(result.loss.value == brute.loss.value);

    // Residual valuations reproduce the l1 value exactly.
    BigRational total = 0;
    for (const int v : residual_valuations(result.network, data))
        if (v < system.effective_precision())
            total += BigRational(1, boost::multiprecision::pow(BigInt(2), v));
    CHECK(total == result.loss.value);
}

TEST_CASE("loss and report serialization round trip") {
    const IntPolynomial z2_minus_3 = univariate({BigInt(-3), BigInt(0), BigInt(1)});
    const LinfMinimum minimum = linf_training_minimum({z2_minus_3}, 3, 1, 4);

    const Json loss_json = loss_to_json(minimum.loss);
    const LossValue loss = loss_from_json(loss_json);
    CHECK(loss.kind == minimum.loss.kind);
    CHECK(loss.exponent == minimum.loss.exponent);
    CHECK(loss.value == minimum.loss.value);

    const Json report_json = report_to_json(minimum.report);
    const DdpReport report = report_from_json(report_json);
    CHECK(report.e_star == minimum.report.e_star);
    CHECK(report.hit_cap == minimum.report.hit_cap);
    CHECK(report.zero_count_per_level == minimum.report.zero_count_per_level);
    CHECK(*report.witness == *minimum.report.witness);
}
