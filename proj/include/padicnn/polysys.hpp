#pragma once

#include <compare>
#include <map>
#include <stdexcept>
#include <vector>

#include "padicnn/network.hpp"

namespace padicnn {

/// Sparse monomial: sorted (variable, exponent) pairs, no zero exponents.
class Monomial {
public:
    Monomial() = default;
    static Monomial variable(int index, int exponent = 1);

    Monomial operator*(const Monomial& o) const;
    int degree() const;
    int exponent_of(int variable) const;
    bool is_constant() const { return factors_.empty(); }
    const std::vector<std::pair<int, int>>& factors() const { return factors_; }

    auto operator<=>(const Monomial&) const = default;

private:
    std::vector<std::pair<int, int>> factors_;
};

/// Sparse multivariate polynomial over Z in a fixed number of variables.
/// Canonical: merged monomials, no zero coefficients.
class IntPolynomial {
public:
    explicit IntPolynomial(int var_count);
    static IntPolynomial constant(int var_count, const BigInt& c);
    static IntPolynomial variable(int var_count, int index);

    int var_count() const { return var_count_; }
    const std::map<Monomial, BigInt>& terms() const { return terms_; }
    int degree() const;

    void add_term(const Monomial& m, const BigInt& coefficient);

    IntPolynomial& operator+=(const IntPolynomial& o);
    IntPolynomial& operator-=(const IntPolynomial& o);
    IntPolynomial operator+(const IntPolynomial& o) const;
    IntPolynomial operator-(const IntPolynomial& o) const;
    IntPolynomial operator*(const IntPolynomial& o) const;
    IntPolynomial scaled(const BigInt& c) const;
    bool operator==(const IntPolynomial&) const = default;

    /// Reduce all coefficients canonically into [0, modulus).
    void reduce_coefficients(const BigInt& modulus);

    IntPolynomial partial_derivative(int variable) const;

private:
    int var_count_;
    std::map<Monomial, BigInt> terms_;
};

/// f(z) mod modulus, all intermediates reduced.
BigInt poly_eval_mod(const IntPolynomial& f, const std::vector<BigInt>& z,
                     const BigInt& modulus);
/// f(z) mod p^e on a context.
BigInt poly_eval_mod(const IntPolynomial& f, const std::vector<BigInt>& z,
                     const PadicContext& ctx, int e);

struct VariableInfo {
    enum class Kind { weight, bias, coeff };  // entries of A, b, p^F C
    Kind kind;
    int row = 0;
    int col = 0;
    bool operator==(const VariableInfo&) const = default;
};

/// Compilation branch the polynomial route cannot express (p = 2 with
/// a = -1 mod 4: the sign split depends on the parity of the argument,
/// which is not polynomial in the parameters).
class UnsupportedCompilation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The training residual as one polynomial per (sample, output row) in the
/// L = DN + D + MD parameter variables, with integer coefficients reduced
/// mod p^(E+F); the polynomial value mod p^(E+F) equals p^F (y - forward).
struct CompiledSystem {
    ContextPtr ctx;      // precision E
    int denom_exponent;  // F
    int input_dim;       // N
    int hidden_dim;      // D
    int output_dim;      // M
    int var_count;       // L
    std::vector<VariableInfo> layout;   // variable index -> parameter
    std::vector<IntPolynomial> polys;   // sample-major, then output row

    int effective_precision() const { return ctx->precision() + denom_exponent; }
};

/// Index of the polynomial variable holding a given parameter.
int weight_variable(int hidden_dim, int input_dim, int row, int col);
int bias_variable(int hidden_dim, int input_dim, int row);
int coeff_variable(int hidden_dim, int input_dim, int row, int col);

/// Compile the residual of fitting `data` with a D-hidden-unit network on
/// character chi (which must live at precision E + F). Requires p != 2 or
/// base = 1 mod 4.
CompiledSystem compile_residual(const Character& chi, const Dataset& data, int hidden_dim);

}  // namespace padicnn
