#include "padicnn/characters.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include <boost/multiprecision/integer.hpp>

namespace padicnn {

namespace {

std::mutex factorial_mutex;
std::map<std::pair<BigInt, int>, std::shared_ptr<const FactorialTable>> factorial_cache;

std::shared_ptr<const FactorialTable> build_factorials(const PadicContext& ctx, int max_index,
                                                       const FactorialTable* shorter) {
    auto table = std::make_shared<FactorialTable>();
    table->reserve(static_cast<std::size_t>(max_index) + 1);
    if (shorter) *table = *shorter;
    if (table->empty()) table->push_back(ValuativePair{0, 1});
    const BigInt& modulus = ctx.modulus();
    for (int e = static_cast<int>(table->size()) - 1; e < max_index; ++e) {
        ValuativePair step = valuative_decomposition(ctx.prime(), BigInt(e + 1));
        const ValuativePair& prev = (*table)[static_cast<std::size_t>(e)];
        table->push_back(
            ValuativePair{prev.valuation + step.valuation, prev.unit * step.unit % modulus});
    }
    return table;
}

}  // namespace

std::shared_ptr<const FactorialTable> factorial_table(const PadicContext& ctx, int max_index) {
    if (max_index < 0) throw std::invalid_argument("factorial_table: max_index must be >= 0");
    const auto key = std::make_pair(ctx.prime(), ctx.precision());
    std::lock_guard<std::mutex> lock(factorial_mutex);
    auto it = factorial_cache.find(key);
    if (it != factorial_cache.end() &&
        it->second->size() > static_cast<std::size_t>(max_index))
        return it->second;
    auto table = build_factorials(ctx, max_index,
                                  it != factorial_cache.end() ? it->second.get() : nullptr);
    factorial_cache[key] = table;
    return table;
}

ExpConstants exp_constants(const BigInt& p, int precision) {
    if (precision < 1) throw std::invalid_argument("exp_constants: precision must be >= 1");
    ExpConstants out;
    out.q_valuation = (p == 2) ? 2 : 1;
    out.q = (p == 2) ? BigInt(4) : p;
    // E' = ceil(E / (m - 1/(p-1))) = ceil(E(p-1) / (m(p-1) - 1)).
    const BigInt num = BigInt(precision) * (p - 1);
    const BigInt den = out.q_valuation * (p - 1) - 1;
    out.series_length = static_cast<int>((num + den - 1) / den);
    return out;
}

Character::Character(ContextPtr ctx, BigInt base, bool exponential)
    : ctx_(std::move(ctx)), base_(std::move(base)), exponential_(exponential) {}

Character Character::with_base(ContextPtr ctx, const BigInt& base) {
    BigInt canonical = mod_canonical(base, ctx->modulus());
    if (canonical % ctx->prime() != 1)
        throw std::domain_error("Character: base must lie in 1 + pZp");
    return Character(std::move(ctx), std::move(canonical), false);
}

Character Character::exponential(ContextPtr ctx) {
    BigInt base = eval_taylor_exp(*ctx, 1);
    return Character(std::move(ctx), std::move(base), true);
}

BigInt eval_mahler(const Character& chi, const BigInt& x) {
    const PadicContext& ctx = *chi.context();
    const int E = ctx.precision();
    const BigInt& p = ctx.prime();
    const BigInt xr = mod_canonical(x, ctx.pow(E - 1));
    const BigInt base_step = mod_canonical(chi.base() - 1, ctx.modulus());

    BigInt y = 0;
    int v = 0;        // valuation of binom(x, e)
    BigInt u = 1;     // coprime part of binom(x, e), mod p^(E-e)
    BigInt power = 1;  // (a-1)^e mod p^E
    for (int e = 0; e < E; ++e) {
        if (e > 0) {
            const BigInt next_factor = xr - e + 1;
            // binom(x, e) = 0 from here on: x is a natural number < e.
            if (next_factor == 0) break;
            const ValuativePair num = valuative_decomposition(p, next_factor);
            const ValuativePair den = valuative_decomposition(p, BigInt(e));
            const BigInt& reduced_modulus = ctx.pow(E - e);
            const BigInt den_inv = mod_inverse(ctx, den.unit, E - e);
            v += num.valuation - den.valuation;
            u = u * num.unit % reduced_modulus * den_inv % reduced_modulus;
            power = power * base_step % ctx.modulus();
        }
        if (v < E) y = (y + ctx.pow(v) * u * power) % ctx.modulus();
    }
    return y;
}

namespace {

// exp_p(c x) mod p^E for c = p^scale_valuation * scale_unit with
// scale_valuation >= m. Truncated Taylor series with per-term working
// precision E - (scale_valuation*e - floor(e/(p-1))); the subtracted
// quantity bounds the term valuation from below and is nondecreasing in e,
// so the running products stay valid at every reduced modulus.
BigInt exp_scaled(const PadicContext& ctx, int scale_valuation, const BigInt& scale_unit,
                  const BigInt& x) {
    const int E = ctx.precision();
    const BigInt& p = ctx.prime();

    const int arg_exponent = std::max(0, E - scale_valuation);
    const BigInt xr = mod_canonical(x, ctx.pow(arg_exponent));

    // Series length from the same Legendre bound, with the actual scale.
    const BigInt num = BigInt(E) * (p - 1);
    const BigInt den = scale_valuation * (p - 1) - 1;
    if (den <= 0) throw std::domain_error("exp_scaled: scale below the convergence margin");
    const int series_length = static_cast<int>((num + den - 1) / den);

    BigInt y = 1;      // e = 0 term
    BigInt units = 1;  // scale_unit^e * (coprime part of e!)^(-1), reduced
    BigInt xe = 1;     // x^e, reduced
    int factorial_valuation = 0;
    for (int e = 1; e < series_length; ++e) {
        // Guaranteed valuation of the term q^e/e! x^e (Legendre's formula).
        BigInt guaranteed = BigInt(scale_valuation) * e - BigInt(e) / (p - 1);
        if (guaranteed >= E) break;
        const int working = E - static_cast<int>(guaranteed);

        const ValuativePair step = valuative_decomposition(p, BigInt(e));
        factorial_valuation += step.valuation;
        const BigInt& reduced_modulus = ctx.pow(working);
        const BigInt step_inv = mod_inverse(ctx, step.unit, working);
        units = units * scale_unit % reduced_modulus * step_inv % reduced_modulus;
        xe = xe * xr % reduced_modulus;

        const int term_valuation = scale_valuation * e - factorial_valuation;
        if (term_valuation < E)
            y = (y + ctx.pow(term_valuation) * units % ctx.modulus() * xe) % ctx.modulus();
    }
    return y;
}

}  // namespace

BigInt eval_taylor_exp(const PadicContext& ctx, const BigInt& x) {
    const ExpConstants c = exp_constants(ctx.prime(), ctx.precision());
    return exp_scaled(ctx, c.q_valuation, 1, x);
}

BigInt eval_binary(const Character& chi, const BigInt& x) {
    const PadicContext& ctx = *chi.context();
    const BigInt xr = mod_canonical(x, ctx.pow(ctx.precision() - 1));
    return boost::multiprecision::powm(chi.base(), xr, ctx.modulus());
}

BigInt eval_character(const Character& chi, const BigInt& x, EvalMethod method) {
    switch (method) {
        case EvalMethod::mahler:
            return eval_mahler(chi, x);
        case EvalMethod::binary:
            return eval_binary(chi, x);
        case EvalMethod::taylor:
            break;
    }
    const PadicContext& ctx = *chi.context();
    if (chi.is_exponential()) return eval_taylor_exp(ctx, x);

    const int E = ctx.precision();
    const bool sign_split =
        ctx.prime() == 2 && E >= 2 && chi.base() % 4 == 3;
    const BigInt log_input =
        sign_split ? mod_canonical(-chi.base(), ctx.modulus()) : chi.base();
    const BigInt log_base = iwasawa_log(ctx, log_input);

    BigInt value;
    if (log_base == 0) {
        value = 1;  // base is trivial at this precision
    } else {
        const ValuativePair scale = valuative_decomposition(ctx.prime(), log_base);
        value = exp_scaled(ctx, scale.valuation, scale.unit, x);
    }
    if (sign_split) {
        // a^x = (-1)^x (-a)^x; parity survives the mod p^(E-1) reduction.
        const BigInt xr = mod_canonical(x, ctx.pow(E - 1));
        if (xr % 2 == 1) value = mod_canonical(-value, ctx.modulus());
    }
    return value;
}

BigInt iwasawa_log(const PadicContext& ctx, const BigInt& y) {
    const int E = ctx.precision();
    const BigInt& p = ctx.prime();
    const int q_valuation = (p == 2) ? 2 : 1;
    const int domain_exponent = std::min(q_valuation, E);
    const BigInt yr = mod_canonical(y, ctx.modulus());
    if (yr % ctx.pow(domain_exponent) != 1)
        throw std::domain_error("iwasawa_log: argument must be 1 mod q");

    const BigInt w = mod_canonical(1 - yr, ctx.modulus());
    if (w == 0) return 0;
    const int w_valuation = valuative_decomposition(p, w).valuation;

    // Smallest cutoff T with e*v(w) - floor(log_p e) >= E for all e >= T;
    // the left side is nondecreasing because v(w) >= 1.
    int cutoff = 1;
    int log_floor = 0;
    {
        BigInt power = p;
        while (BigInt(cutoff) * w_valuation - log_floor < E) {
            ++cutoff;
            while (power <= cutoff) {
                ++log_floor;
                power *= p;
            }
        }
    }

    // Work with enough guard digits that the exact division by p^v(e) still
    // leaves E correct digits.
    const int guard = log_floor + 1;
    const BigInt working_modulus = ctx.pow_extended(E + guard);

    BigInt result = 0;
    BigInt wp = 1;  // w^e mod p^(E+guard)
    for (int e = 1; e < cutoff; ++e) {
        wp = wp * w % working_modulus;
        if (wp == 0) break;
        const ValuativePair index = valuative_decomposition(p, BigInt(e));
        BigInt term = wp / ctx.pow(index.valuation) % ctx.modulus();
        term = term * mod_inverse(ctx, index.unit, E) % ctx.modulus();
        result = mod_canonical(result - term, ctx.modulus());
    }
    return result;
}

bool is_injective(const Character& chi) {
    const PadicContext& ctx = *chi.context();
    if (chi.base() == 1) return false;
    if (ctx.prime() == 2 && chi.base() == ctx.modulus() - 1) return false;
    return true;
}

CharacterInverse invert_character(const Character& chi, const BigInt& y) {
    const PadicContext& ctx = *chi.context();
    const int E = ctx.precision();
    const BigInt& p = ctx.prime();
    if (!is_injective(chi))
        throw std::domain_error("invert_character: character is not injective at this precision");

    const BigInt yr = mod_canonical(y, ctx.modulus());
    const bool base_negative_branch = p == 2 && E >= 2 && chi.base() % 4 == 3;

    BigInt log_base_input;
    BigInt log_value_input;
    if (base_negative_branch) {
        log_base_input = mod_canonical(-chi.base(), ctx.modulus());
        if (yr % 4 == 1) {
            log_value_input = yr;
        } else if (yr % 4 == 3) {
            log_value_input = mod_canonical(-yr, ctx.modulus());
        } else {
            throw std::domain_error("invert_character: y is outside the image congruence class");
        }
    } else {
        const BigInt congruence = (p == 2) ? BigInt(4) : p;
        const BigInt check_modulus = (p == 2 && E < 2) ? BigInt(2) : congruence;
        if (yr % check_modulus != 1)
            throw std::domain_error("invert_character: y is outside the image congruence class");
        log_base_input = chi.base();
        log_value_input = yr;
    }

    const BigInt log_base = iwasawa_log(ctx, log_base_input);
    const BigInt log_value = iwasawa_log(ctx, log_value_input);
    if (log_base == 0)
        throw std::domain_error("invert_character: logarithm of the base vanishes");

    const int cancelled = valuative_decomposition(p, log_base).valuation;
    const int certified = E - cancelled;
    if (log_value == 0) return CharacterInverse{0, certified};

    if (valuative_decomposition(p, log_value).valuation < cancelled)
        throw std::domain_error("invert_character: y is not in the image");

    const BigInt reduced_modulus = ctx.pow(certified);
    const BigInt base_unit = log_base / ctx.pow(cancelled);
    const BigInt value_part = log_value / ctx.pow(cancelled) % reduced_modulus;
    const BigInt x = value_part * mod_inverse(ctx, base_unit, certified) % reduced_modulus;
    return CharacterInverse{x, certified};
}

Character character_multiply(const Character& a, const Character& b) {
    if (!a.context()->same(*b.context()))
        throw std::invalid_argument("character_multiply: context mismatch");
    return Character::with_base(a.context(), a.base() * b.base());
}

}  // namespace padicnn
