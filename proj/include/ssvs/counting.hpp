#pragma once
//! Sizes of heredity-restricted model spaces over m main effects and all
//! C(m, 2) two-way interactions.

#include <cmath>
#include <cstddef>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

namespace ssvs {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    BigInt r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline BigInt pow2(unsigned long e) {
    BigInt r = 1;
    r <<= e;
    return r;
}

/// Candidate terms: m main effects plus C(m, 2) interactions.
inline unsigned long two_way_term_count(unsigned m) {
    return m == 0 ? 0 : m + static_cast<unsigned long>(m) * (m - 1) / 2;
}

/// 2^p, the unrestricted model count.
inline BigInt count_all(unsigned m) { return pow2(two_way_term_count(m)); }

/// Models with nonzero mass when an interaction needs both parents: each set of
/// i active main effects leaves C(i, 2) interactions free.
inline BigInt count_strong(unsigned m) {
    BigInt total = 0;
    for (unsigned i = 0; i <= m; ++i) total += binomial(m, i) * pow2(static_cast<unsigned long>(i) * (i ? i - 1 : 0) / 2);
    return total;
}

/// Models with nonzero mass when an interaction needs at least one parent:
/// i active main effects leave m*i - i(i+1)/2 interactions free.
inline BigInt count_weak(unsigned m) {
    BigInt total = 0;
    for (unsigned i = 0; i <= m; ++i)
        total += binomial(m, i) * pow2(static_cast<unsigned long>(m) * i - static_cast<unsigned long>(i) * (i + 1) / 2);
    return total;
}

/// log2 of a positive big integer, accurate to double precision.
inline double log2_big(const BigInt& x) {
    if (x <= 0) return -std::numeric_limits<double>::infinity();
    std::size_t bits = boost::multiprecision::msb(x);
    if (bits < 60) return std::log2(x.convert_to<double>());
    BigInt top = x >> (bits - 52);
    return std::log2(top.convert_to<double>()) + static_cast<double>(bits - 52);
}

}  // namespace ssvs
