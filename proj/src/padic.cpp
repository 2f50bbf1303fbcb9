#include "padicnn/padic.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/integer.hpp>

namespace padicnn {

ValuativePair valuative_decomposition(const BigInt& p, const BigInt& x) {
    if (x <= 0) throw std::invalid_argument("valuative_decomposition: x must be >= 1");
    ValuativePair out{0, x};
    while (out.unit % p == 0) {
        out.unit /= p;
        ++out.valuation;
    }
    return out;
}

namespace {

BigInt inverse_euclid(const BigInt& x, const BigInt& m) {
    // Iterative extended Euclid; m >= 2 and gcd(x, m) = 1 checked by caller.
    BigInt r0 = m, r1 = x % m, s0 = 0, s1 = 1;
    while (r1 != 0) {
        BigInt q = r0 / r1;
        BigInt r2 = r0 - q * r1;
        BigInt s2 = s0 - q * s1;
        r0 = std::move(r1);
        r1 = std::move(r2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    return mod_canonical(s0, m);
}

// Inverses mod p for 1..p-1, built once per prime with the linear
// recurrence inv[i] = -(p/i) * inv[p mod i].
std::shared_ptr<const std::vector<std::uint32_t>> inverse_mod_p_table(std::uint32_t p) {
    static std::mutex table_mutex;
    static std::map<std::uint32_t, std::shared_ptr<const std::vector<std::uint32_t>>> tables;
    std::lock_guard<std::mutex> lock(table_mutex);
    auto it = tables.find(p);
    if (it != tables.end()) return it->second;
    auto table = std::make_shared<std::vector<std::uint32_t>>(p, 0u);
    if (p > 1) (*table)[1] = 1;
    for (std::uint32_t i = 2; i < p; ++i) {
        std::uint64_t t = static_cast<std::uint64_t>(p / i) * (*table)[p % i] % p;
        (*table)[i] = static_cast<std::uint32_t>(p - t);
    }
    tables.emplace(p, table);
    return table;
}

BigInt inverse_taylor_lift(const PadicContext& ctx, const BigInt& x, int e) {
    const std::uint32_t p = static_cast<std::uint32_t>(ctx.prime());
    auto table = inverse_mod_p_table(p);
    BigInt y = (*table)[static_cast<std::uint32_t>(x % p)];
    // y correct mod p^k implies y(2 - xy) correct mod p^(2k).
    int k = 1;
    while (k < e) {
        k = std::min(2 * k, e);
        const BigInt mk = ctx.pow(k);
        y = mod_canonical(y * (2 - x * y % mk), mk);
    }
    return y;
}

}  // namespace

BigInt mod_inverse(const PadicContext& ctx, const BigInt& x, int e, const InverseConfig& config) {
    if (e < 1 || e > ctx.precision())
        throw std::invalid_argument("mod_inverse: target exponent must satisfy 1 <= e <= E");
    const BigInt xr = mod_canonical(x, ctx.pow(e));
    if (xr % ctx.prime() == 0) throw std::domain_error("mod_inverse: x is not a unit mod p");

    switch (config.strategy) {
        case InverseStrategy::euler_power: {
            // phi(p^e) = p^(e-1)(p-1).
            const BigInt exponent = ctx.pow(e - 1) * (ctx.prime() - 1) - 1;
            return boost::multiprecision::powm(xr, exponent, ctx.pow(e));
        }
        case InverseStrategy::taylor_lift: {
            const bool available = ctx.prime() <= config.taylor_max_prime &&
                                   ctx.pow(e) >= config.taylor_min_modulus;
            if (available) return inverse_taylor_lift(ctx, xr, e);
            return inverse_euclid(xr, ctx.pow(e));
        }
        case InverseStrategy::euclid:
        default:
            return inverse_euclid(xr, ctx.pow(e));
    }
}

namespace {

void require_same_context(const ContextPtr& a, const ContextPtr& b, const char* what) {
    if (!a->same(*b)) throw std::invalid_argument(std::string(what) + ": context mismatch");
}

}  // namespace

PadicResidue::PadicResidue(ContextPtr ctx, const BigInt& raw)
    : ctx_(std::move(ctx)), value_(mod_canonical(raw, ctx_->modulus())) {}

PadicResidue PadicResidue::operator+(const PadicResidue& o) const {
    require_same_context(ctx_, o.ctx_, "PadicResidue::operator+");
    return PadicResidue(ctx_, value_ + o.value_);
}

PadicResidue PadicResidue::operator-(const PadicResidue& o) const {
    require_same_context(ctx_, o.ctx_, "PadicResidue::operator-");
    return PadicResidue(ctx_, value_ - o.value_);
}

PadicResidue PadicResidue::operator*(const PadicResidue& o) const {
    require_same_context(ctx_, o.ctx_, "PadicResidue::operator*");
    return PadicResidue(ctx_, value_ * o.value_);
}

PadicResidue PadicResidue::operator-() const { return PadicResidue(ctx_, -value_); }

bool PadicResidue::operator==(const PadicResidue& o) const {
    return ctx_->same(*o.ctx_) && value_ == o.value_;
}

PadicResidue PadicResidue::pow(const BigInt& exponent) const {
    if (exponent < 0) throw std::invalid_argument("PadicResidue::pow: negative exponent");
    return PadicResidue(ctx_, boost::multiprecision::powm(value_, exponent, ctx_->modulus()));
}

PadicResidue PadicResidue::inverse(int e, const InverseConfig& config) const {
    if (e < 0) e = ctx_->precision();
    return PadicResidue(ctx_, mod_inverse(*ctx_, value_, e, config));
}

ScaledPadic::ScaledPadic(ContextPtr ctx, int denom_exponent, const BigInt& raw_numerator)
    : ctx_(std::move(ctx)), denom_exponent_(denom_exponent) {
    if (denom_exponent_ < 0)
        throw std::invalid_argument("ScaledPadic: denominator exponent must be >= 0");
    num_ = mod_canonical(raw_numerator,
                         ctx_->pow_extended(ctx_->precision() + denom_exponent_));
}

ScaledPadic ScaledPadic::operator+(const ScaledPadic& o) const {
    require_same_context(ctx_, o.ctx_, "ScaledPadic::operator+");
    if (denom_exponent_ != o.denom_exponent_)
        throw std::invalid_argument("ScaledPadic::operator+: denominator exponent mismatch");
    return ScaledPadic(ctx_, denom_exponent_, num_ + o.num_);
}

ScaledPadic ScaledPadic::operator-(const ScaledPadic& o) const {
    require_same_context(ctx_, o.ctx_, "ScaledPadic::operator-");
    if (denom_exponent_ != o.denom_exponent_)
        throw std::invalid_argument("ScaledPadic::operator-: denominator exponent mismatch");
    return ScaledPadic(ctx_, denom_exponent_, num_ - o.num_);
}

ScaledPadic ScaledPadic::operator*(const ScaledPadic& o) const {
    require_same_context(ctx_, o.ctx_, "ScaledPadic::operator*");
    if (denom_exponent_ != o.denom_exponent_)
        throw std::invalid_argument("ScaledPadic::operator*: denominator exponent mismatch");
    const int E = ctx_->precision();
    if (E - denom_exponent_ < 1)
        throw std::domain_error("ScaledPadic::operator*: product certifies no digits (E <= F)");
    auto product_ctx = PadicContext::create(ctx_->prime(), E - denom_exponent_);
    return ScaledPadic(std::move(product_ctx), 2 * denom_exponent_, num_ * o.num_);
}

bool ScaledPadic::operator==(const ScaledPadic& o) const {
    return ctx_->same(*o.ctx_) && denom_exponent_ == o.denom_exponent_ && num_ == o.num_;
}

namespace {

NormInfo norm_of_numerator(const PadicContext& ctx, const BigInt& numerator, int known_exponent,
                           int denom_exponent) {
    NormInfo out;
    if (numerator == 0) {
        out.at_precision_cap = true;
        out.valuation = known_exponent - denom_exponent;
    } else {
        out.valuation = valuative_decomposition(ctx.prime(), numerator).valuation -
                        denom_exponent;
    }
    if (out.valuation >= 0) {
        out.norm = BigRational(1, ctx.pow_extended(static_cast<int>(out.valuation)));
    } else {
        out.norm = BigRational(ctx.pow_extended(static_cast<int>(-out.valuation)), 1);
    }
    return out;
}

}  // namespace

NormInfo padic_norm(const PadicResidue& x) {
    return norm_of_numerator(*x.context(), x.value(), x.context()->precision(), 0);
}

NormInfo padic_norm(const ScaledPadic& x) {
    return norm_of_numerator(*x.context(), x.numerator(),
                             x.context()->precision() + x.denom_exponent(), x.denom_exponent());
}

}  // namespace padicnn
