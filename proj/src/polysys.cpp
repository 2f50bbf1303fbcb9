#include "padicnn/polysys.hpp"

#include <algorithm>

#include <boost/multiprecision/integer.hpp>

namespace padicnn {

Monomial Monomial::variable(int index, int exponent) {
    if (index < 0) throw std::invalid_argument("Monomial: negative variable index");
    if (exponent <= 0) throw std::invalid_argument("Monomial: exponent must be positive");
    Monomial m;
    m.factors_.emplace_back(index, exponent);
    return m;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial out;
    out.factors_.reserve(factors_.size() + o.factors_.size());
    auto a = factors_.begin();
    auto b = o.factors_.begin();
    while (a != factors_.end() || b != o.factors_.end()) {
        if (b == o.factors_.end() || (a != factors_.end() && a->first < b->first)) {
            out.factors_.push_back(*a++);
        } else if (a == factors_.end() || b->first < a->first) {
            out.factors_.push_back(*b++);
        } else {
            out.factors_.emplace_back(a->first, a->second + b->second);
            ++a;
            ++b;
        }
    }
    return out;
}

int Monomial::degree() const {
    int d = 0;
    for (const auto& [var, exp] : factors_) d += exp;
    return d;
}

int Monomial::exponent_of(int variable) const {
    for (const auto& [var, exp] : factors_)
        if (var == variable) return exp;
    return 0;
}

IntPolynomial::IntPolynomial(int var_count) : var_count_(var_count) {
    if (var_count < 0) throw std::invalid_argument("IntPolynomial: negative variable count");
}

IntPolynomial IntPolynomial::constant(int var_count, const BigInt& c) {
    IntPolynomial f(var_count);
    f.add_term(Monomial{}, c);
    return f;
}

IntPolynomial IntPolynomial::variable(int var_count, int index) {
    if (index < 0 || index >= var_count)
        throw std::out_of_range("IntPolynomial::variable: index out of range");
    IntPolynomial f(var_count);
    f.add_term(Monomial::variable(index), 1);
    return f;
}

int IntPolynomial::degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
}

void IntPolynomial::add_term(const Monomial& m, const BigInt& coefficient) {
    if (coefficient == 0) return;
    if (!m.factors().empty() && m.factors().back().first >= var_count_)
        throw std::out_of_range("IntPolynomial::add_term: variable index out of range");
    auto [it, inserted] = terms_.emplace(m, coefficient);
    if (!inserted) {
        it->second += coefficient;
        if (it->second == 0) terms_.erase(it);
    }
}

IntPolynomial& IntPolynomial::operator+=(const IntPolynomial& o) {
    if (var_count_ != o.var_count_)
        throw std::invalid_argument("IntPolynomial: variable count mismatch");
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

IntPolynomial& IntPolynomial::operator-=(const IntPolynomial& o) {
    if (var_count_ != o.var_count_)
        throw std::invalid_argument("IntPolynomial: variable count mismatch");
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

IntPolynomial IntPolynomial::operator+(const IntPolynomial& o) const {
    IntPolynomial out = *this;
    out += o;
    return out;
}

IntPolynomial IntPolynomial::operator-(const IntPolynomial& o) const {
    IntPolynomial out = *this;
    out -= o;
    return out;
}

IntPolynomial IntPolynomial::operator*(const IntPolynomial& o) const {
    if (var_count_ != o.var_count_)
        throw std::invalid_argument("IntPolynomial: variable count mismatch");
    IntPolynomial out(var_count_);
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : o.terms_) out.add_term(ma * mb, ca * cb);
    return out;
}

IntPolynomial IntPolynomial::scaled(const BigInt& c) const {
    IntPolynomial out(var_count_);
    if (c == 0) return out;
    for (const auto& [m, coef] : terms_) out.add_term(m, coef * c);
    return out;
}

void IntPolynomial::reduce_coefficients(const BigInt& modulus) {
    std::map<Monomial, BigInt> reduced;
    for (const auto& [m, c] : terms_) {
        BigInt r = mod_canonical(c, modulus);
        if (r != 0) reduced.emplace(m, std::move(r));
    }
    terms_ = std::move(reduced);
}

IntPolynomial IntPolynomial::partial_derivative(int variable) const {
    IntPolynomial out(var_count_);
    for (const auto& [m, c] : terms_) {
        const int e = m.exponent_of(variable);
        if (e == 0) continue;
        Monomial rest;
        for (const auto& [var, exp] : m.factors()) {
            if (var == variable) {
                if (exp > 1) rest = rest * Monomial::variable(var, exp - 1);
            } else {
                rest = rest * Monomial::variable(var, exp);
            }
        }
        out.add_term(rest, c * e);
    }
    return out;
}

BigInt poly_eval_mod(const IntPolynomial& f, const std::vector<BigInt>& z,
                     const BigInt& modulus) {
    if (static_cast<int>(z.size()) != f.var_count())
        throw std::invalid_argument("poly_eval_mod: point length mismatch");
    BigInt acc = 0;
    for (const auto& [m, c] : f.terms()) {
        BigInt term = mod_canonical(c, modulus);
        for (const auto& [var, exp] : m.factors()) {
            const BigInt base = mod_canonical(z[static_cast<std::size_t>(var)], modulus);
            const BigInt power = boost::multiprecision::powm(base, BigInt(exp), modulus);
            term = term * power % modulus;
        }
        acc = (acc + term) % modulus;
    }
    return acc;
}

BigInt poly_eval_mod(const IntPolynomial& f, const std::vector<BigInt>& z,
                     const PadicContext& ctx, int e) {
    if (e < 1) throw std::invalid_argument("poly_eval_mod: exponent must be >= 1");
    return poly_eval_mod(f, z, ctx.pow_extended(e));
}

int weight_variable(int hidden_dim, int input_dim, int row, int col) {
    (void)hidden_dim;
    return row * input_dim + col;
}

int bias_variable(int hidden_dim, int input_dim, int row) {
    return hidden_dim * input_dim + row;
}

int coeff_variable(int hidden_dim, int input_dim, int row, int col) {
    return hidden_dim * input_dim + hidden_dim + row * hidden_dim + col;
}

CompiledSystem compile_residual(const Character& chi, const Dataset& data, int hidden_dim) {
    data.validate();
    if (hidden_dim < 1) throw std::invalid_argument("compile_residual: D must be >= 1");
    const PadicContext& work = *chi.context();
    const int E = data.ctx->precision();
    const int F = data.denom_exponent;
    const int W = E + F;
    if (work.prime() != data.ctx->prime() || work.precision() != W)
        throw std::invalid_argument("compile_residual: character must live at precision E + F");
    const BigInt& p = work.prime();
    if (p == 2 && W >= 2 && chi.base() % 4 == 3)
        throw UnsupportedCompilation(
            "compile_residual: p = 2 with base = -1 mod 4 has no polynomial form");

    const BigInt working_modulus = work.modulus();  // p^(E+F)

    // chi(w) = exp_p(c w) with c = log_p(base): the truncated series gives
    // an integer-coefficient polynomial once each q^e/e! is split into its
    // p-power and unit part.
    BigInt scale = chi.is_exponential() ? exp_constants(p, W).q : iwasawa_log(work, chi.base());

    const ExpConstants constants = exp_constants(p, W);
    const int series_degree = constants.series_length;  // E''

    std::vector<BigInt> series_coefficient(static_cast<std::size_t>(series_degree), BigInt(0));
    series_coefficient[0] = 1;
    if (scale != 0) {
        const ValuativePair scale_parts = valuative_decomposition(p, scale);
        auto factorials = factorial_table(work, series_degree - 1);
        for (int e = 1; e < series_degree; ++e) {
            const auto& fact = (*factorials)[static_cast<std::size_t>(e)];
            const int term_valuation = scale_parts.valuation * e - fact.valuation;
            if (term_valuation >= W) continue;
            const int unit_precision = W - term_valuation;
            BigInt unit = boost::multiprecision::powm(scale_parts.unit, e,
                                                      work.pow(unit_precision));
            unit = unit * mod_inverse(work, fact.unit, unit_precision) %
                   work.pow(unit_precision);
            series_coefficient[static_cast<std::size_t>(e)] =
                work.pow(term_valuation) * unit % working_modulus;
        }
    }

    CompiledSystem out{data.ctx,   F, data.input_dim, hidden_dim, data.output_dim,
                       hidden_dim * data.input_dim + hidden_dim +
                           data.output_dim * hidden_dim,
                       {},         {}};
    out.layout.resize(static_cast<std::size_t>(out.var_count));
    for (int j = 0; j < hidden_dim; ++j) {
        for (int k = 0; k < data.input_dim; ++k)
            out.layout[static_cast<std::size_t>(
                weight_variable(hidden_dim, data.input_dim, j, k))] =
                VariableInfo{VariableInfo::Kind::weight, j, k};
        out.layout[static_cast<std::size_t>(bias_variable(hidden_dim, data.input_dim, j))] =
            VariableInfo{VariableInfo::Kind::bias, j, 0};
    }
    for (int r = 0; r < data.output_dim; ++r)
        for (int j = 0; j < hidden_dim; ++j)
            out.layout[static_cast<std::size_t>(
                coeff_variable(hidden_dim, data.input_dim, r, j))] =
                VariableInfo{VariableInfo::Kind::coeff, r, j};

    out.polys.reserve(data.samples.size() * static_cast<std::size_t>(data.output_dim));
    for (const auto& sample : data.samples) {
        // Truncated character of the affine form, one polynomial per unit.
        std::vector<IntPolynomial> truncated;
        truncated.reserve(static_cast<std::size_t>(hidden_dim));
        for (int j = 0; j < hidden_dim; ++j) {
            IntPolynomial affine(out.var_count);
            affine.add_term(
                Monomial::variable(bias_variable(hidden_dim, data.input_dim, j)), 1);
            for (int k = 0; k < data.input_dim; ++k)
                affine.add_term(Monomial::variable(weight_variable(hidden_dim,
                                                                   data.input_dim, j, k)),
                                sample.x[static_cast<std::size_t>(k)]);

            IntPolynomial series = IntPolynomial::constant(out.var_count, 1);
            IntPolynomial power = IntPolynomial::constant(out.var_count, 1);
            for (int e = 1; e < series_degree; ++e) {
                power = power * affine;
                power.reduce_coefficients(working_modulus);
                if (series_coefficient[static_cast<std::size_t>(e)] == 0) continue;
                series += power.scaled(series_coefficient[static_cast<std::size_t>(e)]);
                series.reduce_coefficients(working_modulus);
            }
            truncated.push_back(std::move(series));
        }
        for (int r = 0; r < data.output_dim; ++r) {
            IntPolynomial residual = IntPolynomial::constant(
                out.var_count, sample.y[static_cast<std::size_t>(r)].numerator());
            for (int j = 0; j < hidden_dim; ++j) {
                IntPolynomial c_var = IntPolynomial::variable(
                    out.var_count, coeff_variable(hidden_dim, data.input_dim, r, j));
                residual -= c_var * truncated[static_cast<std::size_t>(j)];
            }
            residual.reduce_coefficients(working_modulus);
            out.polys.push_back(std::move(residual));
        }
    }
    return out;
}

}  // namespace padicnn
