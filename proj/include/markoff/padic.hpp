// include/markoff/padic.hpp — places of Q, valuations, quadratic symbols, Hilbert symbols.
#pragma once

#include "markoff/numeric.hpp"

#include <cassert>
#include <string>

namespace markoff {

/**
 * An element of (1/2)Z/Z written additively: 0 or 1/2.  Brauer pairings and
 * Hilbert symbols land here, and sums are XORs.
 */
struct Half {
    std::uint8_t bit = 0;  // 0 -> "0", 1 -> "1/2"

    constexpr Half() = default;
    constexpr explicit Half(int b) : bit(static_cast<std::uint8_t>(b & 1)) {}

    friend constexpr Half operator+(Half a, Half b) { return Half(a.bit ^ b.bit); }
    Half& operator+=(Half o) { bit ^= o.bit; return *this; }
    friend constexpr bool operator==(Half a, Half b) { return a.bit == b.bit; }
    friend constexpr bool operator!=(Half a, Half b) { return a.bit != b.bit; }

    bool is_zero() const { return bit == 0; }
    std::string str() const { return bit ? "1/2" : "0"; }
};

inline constexpr Half half_zero{0};
inline constexpr Half half_half{1};

/** A place of Q: a finite prime, or the real place. */
struct Place {
    i64 p = 0;  // 0 encodes the real place

    static Place real() { return Place{0}; }
    static Place finite(i64 prime) { return Place{prime}; }
    bool is_real() const { return p == 0; }
    friend bool operator==(Place a, Place b) { return a.p == b.p; }
    std::string str() const { return is_real() ? "inf" : std::to_string(p); }
};

/** p-adic valuation of a nonzero integer. */
inline int valuation(Int a, i64 p) {
    if (a == 0) throw std::domain_error("valuation of zero");
    int v = 0;
    while (a % p == 0) { a /= p; ++v; }
    return v;
}

inline int valuation_i64(i64 a, i64 p) {
    if (a == 0) throw std::domain_error("valuation of zero");
    int v = 0;
    while (a % p == 0) { a /= p; ++v; }
    return v;
}

/** a with all factors of p removed (sign preserved). */
inline Int unit_part(Int a, i64 p) {
    if (a == 0) throw std::domain_error("valuation of zero");
    while (a % p == 0) a /= p;
    return a;
}

/** Legendre symbol (a/p) in {-1, 0, 1}; p an odd prime. */
inline int legendre(const Int& a, i64 p) {
    u64 r = static_cast<u64>(mod_math(checked_i64(a % p), p));
    if (r == 0) return 0;
    u64 e = powmod(r, static_cast<u64>((p - 1) / 2), static_cast<u64>(p));
    return e == 1 ? 1 : -1;
}

inline int legendre_i64(i64 a, i64 p) { return legendre(Int(a), p); }

/** True when the nonzero rational a is a square in the completion at v. */
inline bool is_square_qp(const Int& a, Place v) {
    if (a == 0) throw std::domain_error("valuation of zero");
    if (v.is_real()) return a > 0;
    i64 p = v.p;
    int e = valuation(a, p);
    if (e % 2 != 0) return false;
    Int u = unit_part(a, p);
    if (p == 2) return mod_math(checked_i64(u % 8), 8) == 1;
    return legendre(u, p) == 1;
}

inline bool is_square_qp(const Rat& a, Place v) {
    return is_square_qp(Int(a.numerator() * a.denominator()), v);
}

namespace detail {

// chi(u) = 0 iff u is a quadratic residue mod the odd prime p.
inline int chi_odd(const Int& u, i64 p) { return legendre(u, p) == 1 ? 0 : 1; }
// eps(p) = (p-1)/2 mod 2; also used for odd units at p = 2.
inline int eps_mod2(const Int& u) { return static_cast<int>(((u - 1) / 2) % 2 != 0); }
// omega(u) = (u^2-1)/8 mod 2 for odd u.
inline int omega_mod2(const Int& u) { return static_cast<int>(((u * u - 1) / 8) % 2 != 0); }

}  // namespace detail

/**
 * Hilbert symbol (a, b)_v written additively in {0, 1/2}: the symbol is 0
 * exactly when z^2 = a x^2 + b y^2 has a nontrivial solution over the
 * completion at v.
 */
inline Half hilbert(const Int& a, const Int& b, Place v) {
    if (a == 0 || b == 0) throw std::domain_error("valuation of zero");
    if (v.is_real()) return Half(a < 0 && b < 0 ? 1 : 0);
    i64 p = v.p;
    int alpha = valuation(a, p);
    int beta = valuation(b, p);
    Int ua = unit_part(a, p);
    Int ub = unit_part(b, p);
    if (p == 2) {
        int s = detail::eps_mod2(ua) * detail::eps_mod2(ub) + alpha * detail::omega_mod2(ub) +
                beta * detail::omega_mod2(ua);
        return Half(s);
    }
    int eps_p = static_cast<int>(((p - 1) / 2) % 2);
    int s = alpha * beta * eps_p + beta * detail::chi_odd(ua, p) + alpha * detail::chi_odd(ub, p);
    return Half(s);
}

inline Half hilbert(const Rat& a, const Rat& b, Place v) {
    return hilbert(Int(a.numerator() * a.denominator()), Int(b.numerator() * b.denominator()), v);
}

/**
 * Product formula: the sum of (a, b)_v over the real place and all primes
 * dividing 2ab must vanish.  Returns that sum (zero on correct input) so a
 * test can assert it.
 */
inline Half hilbert_reciprocity_check(const Int& a, const Int& b) {
    if (a == 0 || b == 0) throw std::domain_error("valuation of zero");
    Half total = hilbert(a, b, Place::real());
    Int prod = 2 * a * b;
    std::vector<i64> ps = prime_divisors_abs(checked_i64(prod < 0 ? -prod : prod));
    for (i64 p : ps) total += hilbert(a, b, Place::finite(p));
    return total;
}

/** Modular inverse; m > 1, gcd(a, m) = 1. */
inline u64 inv_mod_u64(u64 a, u64 m) {
    i64 t = 0, newt = 1;
    i64 r = static_cast<i64>(m), newr = static_cast<i64>(a % m);
    while (newr != 0) {
        i64 q = r / newr;
        i64 tmp = t - q * newt;
        t = newt; newt = tmp;
        tmp = r - q * newr;
        r = newr; newr = tmp;
    }
    if (r != 1) throw std::domain_error("inverse of non-unit");
    return static_cast<u64>(t < 0 ? t + static_cast<i64>(m) : t);
}

/** Tonelli–Shanks: square root of a quadratic residue mod an odd prime. */
inline u64 sqrt_mod_p(u64 a, u64 p) {
    a %= p;
    if (a == 0) return 0;
    if (powmod(a, (p - 1) / 2, p) != 1) throw std::domain_error("sqrt of non-residue");
    if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
    u64 q = p - 1;
    int s = 0;
    while ((q & 1) == 0) { q >>= 1; ++s; }
    u64 z = 2;
    while (powmod(z, (p - 1) / 2, p) == 1) ++z;
    u64 m = static_cast<u64>(s);
    u64 c = powmod(z, q, p);
    u64 t = powmod(a, q, p);
    u64 r = powmod(a, (q + 1) / 2, p);
    while (t != 1) {
        u64 i = 0, tt = t;
        while (tt != 1) { tt = mulmod(tt, tt, p); ++i; }
        u64 b = c;
        for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    return r;
}

/** p^k as u64 with an overflow guard. */
inline u64 pow_u64_checked(i64 p, int k) {
    u64 r = 1;
    for (int i = 0; i < k; ++i) {
        if (r > (u64(1) << 62) / static_cast<u64>(p)) throw std::overflow_error("precision cap: modulus exceeds 64-bit budget");
        r *= static_cast<u64>(p);
    }
    return r;
}

/**
 * Square root of a unit square mod p^k (odd p), lifted by Newton steps from
 * the mod-p root.
 */
inline u64 sqrt_mod_p_pow(u64 a, i64 p, int k) {
    u64 pk = pow_u64_checked(p, k);
    a %= pk;
    u64 x = sqrt_mod_p(a % static_cast<u64>(p), static_cast<u64>(p));
    u64 mod = static_cast<u64>(p);
    int prec = 1;
    while (prec < k) {
        prec = std::min(2 * prec, k);
        mod = pow_u64_checked(p, prec);
        // x <- x - (x^2 - a) / (2x) mod p^prec
        u64 num = (mulmod(x, x, mod) + mod - a % mod) % mod;
        u64 inv2x = inv_mod_u64(2 * x % mod, mod);
        x = (x + mod - mulmod(num, inv2x, mod)) % mod;
    }
    return x % pk;
}

}  // namespace markoff
