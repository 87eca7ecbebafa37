#pragma once

// Internal arithmetic shared by the RSA and factoring code. The u64 overloads
// are the fast path; BigInt covers everything else.

#include <cstdint>
#include <cmath>
#include <numeric>

#include "qlab/bigint.hpp"

namespace qlab::factorlab::detail {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) {
    if (m <= UINT32_MAX)
        return (a * b) % m;
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline BigInt mulmod(const BigInt &a, const BigInt &b, const BigInt &m) { return a * b % m; }

inline u64 addmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>((static_cast<u128>(a) + b) % m);
}

inline BigInt addmod(const BigInt &a, const BigInt &b, const BigInt &m) { return (a + b) % m; }

inline u64 gcd(u64 a, u64 b) { return std::gcd(a, b); }

inline BigInt gcd(const BigInt &a, const BigInt &b) { return boost::multiprecision::gcd(a, b); }

template <class UInt> UInt abs_diff(const UInt &a, const UInt &b) { return a > b ? a - b : b - a; }

template <class UInt> UInt powmod(UInt base, UInt exponent, const UInt &m) {
    UInt result = 1 % m;
    base %= m;
    while (exponent != 0) {
        if ((exponent & 1) != 0)
            result = mulmod(result, base, m);
        exponent >>= 1;
        if (exponent != 0)
            base = mulmod(base, base, m);
    }
    return result;
}

inline u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && static_cast<u128>(r) * r > n)
        --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

} // namespace qlab::factorlab::detail
