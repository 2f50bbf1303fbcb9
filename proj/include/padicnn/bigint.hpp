#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace padicnn {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Canonical representative of x in [0, m). Requires m >= 1.
inline BigInt mod_canonical(const BigInt& x, const BigInt& m) {
    BigInt r = x % m;
    if (r < 0) r += m;
    return r;
}

}  // namespace padicnn
