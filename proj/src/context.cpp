#include "padicnn/context.hpp"

#include <stdexcept>

#include <boost/multiprecision/integer.hpp>

namespace padicnn {

namespace {

// Miller-Rabin round for witness w; n odd, n - 1 = 2^s * d.
bool strong_probable_prime(const BigInt& n, const BigInt& d, int s, const BigInt& w) {
    BigInt x = boost::multiprecision::powm(w % n, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int r = 1; r < s; ++r) {
        x = (x * x) % n;
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace

bool is_prime(const BigInt& n) {
    if (n < 2) return false;
    static const int small_primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                       31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
    for (int q : small_primes) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    // Witness set proven exhaustive for n < 3,317,044,064,679,887,385,961,981.
    static const BigInt deterministic_bound("3317044064679887385961981");
    if (n >= deterministic_bound)
        throw std::invalid_argument("is_prime: candidate exceeds the deterministic witness bound");

    BigInt d = n - 1;
    int s = 0;
    while (d % 2 == 0) {
        d >>= 1;
        ++s;
    }
    for (int w : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (!strong_probable_prime(n, d, s, BigInt(w))) return false;
    }
    return true;
}

PadicContext::PadicContext(BigInt prime, int precision)
    : prime_(std::move(prime)), precision_(precision) {
    powers_.reserve(static_cast<std::size_t>(precision_) + 1);
    BigInt v = 1;
    for (int k = 0; k <= precision_; ++k) {
        powers_.push_back(v);
        v *= prime_;
    }
}

ContextPtr PadicContext::create(BigInt prime, int precision) {
    if (precision < 1) throw std::invalid_argument("PadicContext: precision must be >= 1");
    if (!is_prime(prime)) throw std::invalid_argument("PadicContext: p must be prime");
    return ContextPtr(new PadicContext(std::move(prime), precision));
}

const BigInt& PadicContext::pow(int k) const {
    if (k < 0 || k > precision_)
        throw std::out_of_range("PadicContext::pow: exponent outside the powers table");
    return powers_[static_cast<std::size_t>(k)];
}

BigInt PadicContext::pow_extended(int k) const {
    if (k < 0) throw std::out_of_range("PadicContext::pow_extended: negative exponent");
    if (k <= precision_) return powers_[static_cast<std::size_t>(k)];
    BigInt v = powers_[static_cast<std::size_t>(precision_)];
    for (int i = precision_; i < k; ++i) v *= prime_;
    return v;
}

}  // namespace padicnn
