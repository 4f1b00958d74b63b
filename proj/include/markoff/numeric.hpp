// include/markoff/numeric.hpp — exact integer arithmetic helpers shared by every module.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace markoff {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::rational<Int>;
using i64 = std::int64_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i128 = __int128;

/** Mathematical remainder: result lies in [0, n) for n > 0, regardless of sign of a. */
inline i64 mod_math(i64 a, i64 n) {
    i64 r = a % n;
    return r < 0 ? r + n : r;
}

inline u64 mulmod(u64 a, u64 b, u64 n) { return static_cast<u64>((u128)a * b % n); }

inline u64 powmod(u64 base, u64 exp, u64 n) {
    if (n == 1) return 0;
    u64 r = 1;
    base %= n;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, n);
        base = mulmod(base, base, n);
        exp >>= 1;
    }
    return r;
}

/** Deterministic Miller–Rabin for the full 64-bit range. */
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

inline bool is_prime_i64(i64 n) { return n >= 2 && is_prime_u64(static_cast<u64>(n)); }

/** Floor of the square root, exact. */
inline u64 isqrt_u64(u64 n) {
    if (n == 0) return 0;
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && (u128)r * r > n) --r;
    while ((u128)(r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline i64 isqrt_i64(i64 n) {
    if (n < 0) throw std::domain_error("isqrt of negative value");
    return static_cast<i64>(isqrt_u64(static_cast<u64>(n)));
}

inline Int isqrt_int(const Int& n) {
    if (n < 0) throw std::domain_error("isqrt of negative value");
    return boost::multiprecision::sqrt(n);
}

/** Returns the exact square root when n is a perfect square, nothing otherwise. */
inline std::optional<i64> perfect_square_i64(i64 n) {
    if (n < 0) return std::nullopt;
    i64 r = isqrt_i64(n);
    if (r * r == n) return r;
    return std::nullopt;
}

inline std::optional<Int> perfect_square_int(const Int& n) {
    if (n < 0) return std::nullopt;
    Int r = isqrt_int(n);
    if (r * r == n) return r;
    return std::nullopt;
}

/** True when q is the square of a rational (works on the reduced fraction). */
inline bool is_rational_square(const Rat& q) {
    if (q < 0) return false;
    return perfect_square_int(q.numerator()).has_value() &&
           perfect_square_int(q.denominator()).has_value();
}

inline std::optional<Rat> rational_sqrt(const Rat& q) {
    if (q < 0) return std::nullopt;
    auto n = perfect_square_int(q.numerator());
    auto d = perfect_square_int(q.denominator());
    if (!n || !d) return std::nullopt;
    return Rat(*n, *d);
}

namespace detail {

inline u64 pollard_brent(u64 n) {
    if ((n & 1) == 0) return 2;
    u64 x0 = 2, c = 1;
    while (true) {
        u64 x = x0, y = x0, d = 1;
        u64 q = 1;
        int lam = 1;
        while (d == 1) {
            x = y;
            for (int i = 0; i < lam; ++i) y = (mulmod(y, y, n) + c) % n;
            int k = 0;
            while (k < lam && d == 1) {
                u64 ys = y;
                int lim = std::min(128, lam - k);
                for (int i = 0; i < lim; ++i) {
                    y = (mulmod(y, y, n) + c) % n;
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                d = std::gcd(q, n);
                if (d == n) {
                    // Backtrack one squaring at a time.
                    d = 1;
                    y = ys;
                    while (d == 1) {
                        y = (mulmod(y, y, n) + c) % n;
                        d = std::gcd(x > y ? x - y : y - x, n);
                    }
                    break;
                }
                k += lim;
            }
            lam *= 2;
        }
        if (d != n) return d;
        ++c;
        ++x0;
    }
}

inline void factor_rec(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) { out.push_back(n); return; }
    u64 d = pollard_brent(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace detail

/** Prime factorization n = ∏ p^e as sorted (p, e) pairs; n must be positive. */
inline std::vector<std::pair<u64, int>> factorize_u64(u64 n) {
    if (n == 0) throw std::domain_error("factorize of zero");
    std::vector<u64> primes;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull}) {
        while (n % p == 0) { primes.push_back(p); n /= p; }
    }
    detail::factor_rec(n, primes);
    std::sort(primes.begin(), primes.end());
    std::vector<std::pair<u64, int>> out;
    for (u64 p : primes) {
        if (!out.empty() && out.back().first == p) ++out.back().second;
        else out.emplace_back(p, 1);
    }
    return out;
}

/** Factorization of |n| for nonzero signed input. */
inline std::vector<std::pair<u64, int>> factorize_abs_i64(i64 n) {
    if (n == 0) throw std::domain_error("factorize of zero");
    u64 a = n < 0 ? static_cast<u64>(-(n + 1)) + 1 : static_cast<u64>(n);
    return factorize_u64(a);
}

/** Sorted distinct prime divisors of |n|. */
inline std::vector<i64> prime_divisors_abs(i64 n) {
    std::vector<i64> out;
    for (auto& [p, e] : factorize_abs_i64(n)) out.push_back(static_cast<i64>(p));
    return out;
}

inline i64 checked_i64(const Int& v) {
    if (v > std::numeric_limits<i64>::max() || v < std::numeric_limits<i64>::min())
        throw std::overflow_error("value exceeds 64-bit range");
    return static_cast<i64>(v);
}

}  // namespace markoff
