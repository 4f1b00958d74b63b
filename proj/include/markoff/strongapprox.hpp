#pragma once

/*
 * Witnesses against strong approximation: certified finite obstructions to
 * the density of integral points inside the adelic points away from an
 * excluded set of places.
 *
 * Such a witness pins down a finite modulus D together with a short list of
 * target residues modulo D and certifies two facts.
 *
 *   Local: for every prime p | D the target pattern contains a p-adic point,
 *   exhibited by an explicit Hensel certificate, so the targets cut out a
 *   nonempty open subset of the adelic points away from the excluded places.
 *
 *   Global: every integral point reduces to one of the finitely many
 *   fundamental representatives, the symmetry orbit of each representative
 *   modulo D is a finite computable set, and the transcript records that
 *   none of those orbit closures meets a target.  When the level sits just
 *   above a square the x = 2 line is swept separately; the sweep suffices
 *   because the target set is invariant under the full symmetry group.
 *
 * Together the targets form a nonempty open set disjoint from the closure of
 * the integral points, so the integral points are not dense off the excluded
 * places whenever the surface has adelic points at all.
 *
 * Two constructions are provided.  The generic one targets the six
 * coordinate patterns (+-aR, 0, 0), (0, +-aR, 0), (0, 0, +-aR) modulo
 * D = (aR)^2 - m, where R collects the excluded primes away from the level
 * and a is the smallest admissible scale.  The cone level m = 0 instead uses
 * a square-residue device: a prime l = 1 (mod 4) outside the excluded set,
 * the modulus l^2, and the targets (delta*l, l, 0) with delta^2 = -1 (mod l).
 */

#include "markoff/descent.hpp"
#include "markoff/padic.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace markoff {

/** Local leg of a witness: a certified p-adic point hitting the target mod p^e. */
struct PatternLift {
    i64 p = 0;        // prime dividing the modulus
    int e = 0;        // exact multiplicity, p^e || modulus
    LocalPoint point; // Hensel certificate; its residue mod p^e sits in a target
};

/** Global leg of a witness: one fundamental representative's orbit closure. */
struct OrbitCheck {
    Triple rep;
    u64 orbit_size = 0;
    bool disjoint = false; // orbit mod modulus misses every target
};

/** Square-residue device for the cone level m = 0. */
struct SquareDevice {
    i64 l = 0;     // prime l = 1 (mod 4) outside the excluded set
    i64 delta = 0; // normalized root of -1 mod l, 2*delta < l
};

/**
 * A verified failure-of-density witness.  All fields are reproducible from
 * (m, s_primes, prime_modulus) alone; verify() re-derives them from scratch.
 */
struct SAWitness {
    i64 m = 0;
    std::vector<i64> s_primes; // finite primes of the excluded set (infinity implicit)

    i64 a = 0;                 // pattern scale (0 when the device is engaged)
    i64 r = 1;                 // product of excluded primes away from the level
    i64 modulus = 0;           // (a*r)^2 - m, or l^2 for the device
    bool prime_modulus = false; // produced by the prime-level search (r = 1, modulus prime)
    std::optional<SquareDevice> device; // engaged exactly for m = 0

    std::vector<std::array<u64, 3>> targets; // residues mod modulus, sorted
    std::vector<PatternLift> lifts;          // one per prime dividing the modulus
    std::vector<OrbitCheck> checks;          // one per fundamental representative
    std::optional<i64> family_s;             // x = 2 line present (m - 4 = s^2)
    bool family_disjoint = true;

    bool verify() const;
    std::string json() const;
};

namespace detail {

/** Sorted distinct primes of the excluded set; rejects non-primes loudly. */
inline std::vector<i64> validated_primes(const std::vector<i64>& excluded) {
    std::vector<i64> out(excluded);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (i64 p : out)
        if (!is_prime_i64(p)) throw std::domain_error("excluded places must be primes");
    return out;
}

/** The six coordinate patterns (+-w, 0, 0), (0, +-w, 0), (0, 0, +-w) mod D. */
inline std::vector<std::array<u64, 3>> coordinate_patterns(i64 w, u64 D) {
    const u64 pos = mod_math_u64(w, D);
    const u64 neg = (D - pos) % D;
    std::set<std::array<u64, 3>> out;
    for (u64 v : {pos, neg})
        for (int i = 0; i < 3; ++i) {
            std::array<u64, 3> t{0, 0, 0};
            t[i] = v;
            out.insert(t);
        }
    return {out.begin(), out.end()};
}

/**
 * Certified p-adic point over the pattern (w, 0, 0): the exact square root of
 * m congruent to w mod p^e, found by Newton lifting.  Needs p odd, p coprime
 * to m and to w, and p^e || w^2 - m; exactly one root branch then matches.
 */
inline PatternLift pattern_lift(const SurfaceParams& sp, i64 p, int e, i64 w) {
    const int k = e + 2;
    const u64 pk = pow_u64_checked(p, k);
    const u64 pe = pow_u64_checked(p, e);
    const u64 want = mod_math_u64(w, pe);
    u64 root = sqrt_mod_p_pow(mod_math_u64(sp.m, pk), p, k);
    if (root % pe != want) root = (pk - root) % pk;
    if (root % pe != want)
        throw std::logic_error("witness refuted: no square-root branch matches the pattern");
    PatternLift lift{p, e, LocalPoint{p, k, {root, 0, 0}, 0, 0}};
    if (!local_point_ok(sp, lift.point))
        throw std::logic_error("witness refuted: local certificate failed to check");
    return lift;
}

/**
 * Certified l-adic point over the device target (delta*l, l, 0) on the cone
 * m = 0: the exact point is (l*u, l, 0) with u^2 = -1, and the middle partial
 * 2y - xz = 2l has valuation 1, so precision 5 certifies it.
 */
inline PatternLift device_lift(const SurfaceParams& sp, const SquareDevice& dev) {
    const i64 l = dev.l;
    const int k = 5;
    const u64 pk = pow_u64_checked(l, k);
    const u64 l3 = pow_u64_checked(l, 3);
    u64 u = sqrt_mod_p_pow(l3 - 1, l, 3); // u^2 = -1 (mod l^3)
    if (u % static_cast<u64>(l) != static_cast<u64>(dev.delta)) u = l3 - u;
    if (u % static_cast<u64>(l) != static_cast<u64>(dev.delta))
        throw std::logic_error("witness refuted: no square-root branch matches the device");
    PatternLift lift{l, 2, LocalPoint{l, k, {mulmod(u, static_cast<u64>(l), pk), static_cast<u64>(l), 0}, 1, 1}};
    if (!local_point_ok(sp, lift.point))
        throw std::logic_error("witness refuted: local certificate failed to check");
    return lift;
}

/**
 * Smallest scale a for the excluded set: with R the product of the excluded
 * primes away from the level and w = aR, demands gcd(a, m) = 1, w^2 > |m| + 9,
 * w^2 - 2w - m >= 0, and a modulus w^2 - m that is odd and coprime to the
 * excluded primes and to the level.  (An even modulus never works: over the
 * 2-adics the valuation of x^2 - m is pinned below the valuation a pattern
 * point would need, so the targets would be empty at 2.)
 */
inline std::pair<i64, i64> pattern_scale(const SurfaceParams& sp, const std::vector<i64>& s_primes) {
    i64 r = 1;
    for (i64 p : s_primes) {
        if (sp.m % p == 0) continue;
        if (r > 1'000'000 / p) throw std::overflow_error("excluded set is too large to scale");
        r *= p;
    }
    const std::vector<i64> m_primes = prime_divisors_abs(sp.m);
    const i128 floor2 = i128(sp.m < 0 ? -sp.m : sp.m) + 9;
    for (i64 a = 1; a <= 10'000'000; ++a) {
        if (std::gcd(a, sp.m) != 1) continue;
        const i128 w = i128(a) * r;
        if (w * w <= floor2) continue;
        if (w * w - 2 * w - sp.m < 0) continue;
        const i128 big = w * w - sp.m;
        if (big % 2 == 0) continue;
        if (big >= (i128(1) << 31)) throw std::overflow_error("witness modulus exceeds the orbit range");
        const i64 D = static_cast<i64>(big);
        bool ok = true;
        for (i64 p : s_primes)
            if (D % p == 0) { ok = false; break; }
        if (ok)
            for (i64 q : m_primes)
                if (D % q == 0) { ok = false; break; }
        if (ok) return {a, r};
    }
    throw std::logic_error("no admissible scale below the search ceiling");
}

/** Smallest prime l = 1 (mod 4) outside the excluded set, for the device. */
inline i64 device_prime(const std::vector<i64>& s_primes) {
    for (i64 l = 5; l < 1'000'000; l += 4) {
        if (!is_prime_i64(l)) continue;
        if (std::binary_search(s_primes.begin(), s_primes.end(), l)) continue;
        return l;
    }
    throw std::logic_error("no device prime below the search ceiling");
}

/** Whether a qualifies for the prime-level obstruction: l = a^2 - m prime, etc. */
inline bool prime_scale_ok(const SurfaceParams& sp, i64 a) {
    const i128 a2 = i128(a) * a;
    if (a2 <= i128(sp.m < 0 ? -sp.m : sp.m) + 9) return false;
    if (a2 - 2 * a - sp.m < 0) return false;
    const i128 big = a2 - sp.m;
    if (big >= (i128(1) << 31)) return false; // beyond the verifiable orbit range
    const i64 l = static_cast<i64>(big);
    if (!is_prime_i64(l)) return false;
    return std::gcd(l, 2 * a) == 1;
}

/** First scale worth trying for the prime-level search: a^2 > |m| + 9. */
inline i64 prime_scale_floor(const SurfaceParams& sp) {
    const i64 bound = (sp.m < 0 ? -sp.m : sp.m) + 9;
    return static_cast<i64>(isqrt_i64(bound)) + 1;
}

/** True when the x = 2 line sweep {(2, y, y +- s)} meets the target residue. */
inline bool family_hits(i64 s, const std::array<u64, 3>& target, u64 D) {
    if (target[0] != 2 % D) return false;
    const u64 su = mod_math_u64(s, D);
    return (target[1] + su) % D == target[2] || (target[1] + D - su) % D == target[2];
}

/**
 * Global leg: orbits of all fundamental representatives mod the modulus must
 * miss every target, and so must the x = 2 line sweep when the family is
 * present.  Fills the transcript; throws if the witness would be refuted.
 */
inline void run_orbit_checks(const SurfaceParams& sp, SAWitness& w) {
    const FundamentalSet fund = fundamental_solutions(sp);
    const u64 D = static_cast<u64>(w.modulus);
    w.checks.clear();
    for (const Triple& rep : fund.points) {
        const auto orbit = orbit_mod_n(sp, rep, D);
        for (const auto& t : w.targets)
            if (orbit.count(t))
                throw std::logic_error("witness refuted: a fundamental orbit meets the target set");
        w.checks.push_back({rep, orbit.size(), true});
    }
    w.family_s.reset();
    w.family_disjoint = true;
    if (fund.family) {
        w.family_s = fund.family->s;
        for (const auto& t : w.targets)
            if (family_hits(fund.family->s, t, D))
                throw std::logic_error("witness refuted: the line family meets the target set");
    }
}

}  // namespace detail

/**
 * Constructs and verifies a density-failure witness for the excluded set
 * given by the listed finite primes together with the infinite place.
 *
 * For m != 0 this is the six-pattern witness at the smallest admissible
 * scale; for m = 0 it is the square-residue device.  The singular level
 * m = 4 has no reduction theory and is rejected by the descent layer.
 * Refutation errors never fire on correct inputs: they would disprove the
 * completeness of the fundamental list.
 */
inline SAWitness sa_witness(const SurfaceParams& sp, const std::vector<i64>& excluded) {
    SAWitness w;
    w.m = sp.m;
    w.s_primes = detail::validated_primes(excluded);
    if (sp.m == 0) {
        SquareDevice dev;
        dev.l = detail::device_prime(w.s_primes);
        const u64 ul = static_cast<u64>(dev.l);
        const u64 d0 = sqrt_mod_p(ul - 1, ul);
        dev.delta = static_cast<i64>(std::min(d0, ul - d0));
        w.device = dev;
        w.modulus = dev.l * dev.l;
        const u64 L2 = static_cast<u64>(w.modulus);
        std::set<std::array<u64, 3>> ts;
        ts.insert({static_cast<u64>(dev.delta) * ul % L2, ul, 0});
        ts.insert({static_cast<u64>(dev.l - dev.delta) * ul % L2, ul, 0});
        w.targets.assign(ts.begin(), ts.end());
        w.lifts = {detail::device_lift(sp, dev)};
    } else {
        const auto [a, r] = detail::pattern_scale(sp, w.s_primes);
        w.a = a;
        w.r = r;
        const i64 ar = a * r;
        w.modulus = ar * ar - sp.m;
        w.targets = detail::coordinate_patterns(ar, static_cast<u64>(w.modulus));
        for (const auto& [p, e] : factorize_abs_i64(w.modulus)) {
            const i64 pi = static_cast<i64>(p);
            w.lifts.push_back(detail::pattern_lift(sp, pi, e, ar));
            if (!hensel_lift_point(sp, pi, {mod_math_u64(ar, p), 0, 0}, 1))
                throw std::logic_error("witness refuted: the coordinate seed does not lift");
        }
    }
    detail::run_orbit_checks(sp, w);
    return w;
}

/**
 * Prime-level non-surjectivity: the smallest scale a <= a_bound such that
 * l = a^2 - m is prime (with a^2 - 2a - m >= 0 and a^2 > |m| + 9) yields a
 * six-pattern witness mod l, showing the integral points miss residues of
 * the smooth mod-l point (a, 0, 0).  Returns nothing when no scale below the
 * bound works; demands a level that is not a perfect square, since a square
 * level really does hit the pattern at (sqrt(m), 0, 0).
 */
inline std::optional<SAWitness> mod_l_nonsurjectivity(const SurfaceParams& sp, i64 a_bound = 1'000'000) {
    if (sp.sqrt_m()) throw std::domain_error("prime-level obstruction needs a non-square level");
    for (i64 a = detail::prime_scale_floor(sp); a <= a_bound; ++a) {
        if (!detail::prime_scale_ok(sp, a)) continue;
        SAWitness w;
        w.m = sp.m;
        w.prime_modulus = true;
        w.a = a;
        w.modulus = a * a - sp.m;
        w.targets = detail::coordinate_patterns(a, static_cast<u64>(w.modulus));
        w.lifts = {detail::pattern_lift(sp, w.modulus, 1, a)};
        if (!hensel_lift_point(sp, w.modulus, {mod_math_u64(a, static_cast<u64>(w.modulus)), 0, 0}, 1))
            throw std::logic_error("witness refuted: the coordinate seed does not lift");
        detail::run_orbit_checks(sp, w);
        return w;
    }
    return std::nullopt;
}

/** Re-derives the whole witness from (m, s_primes, prime_modulus) and compares. */
inline bool SAWitness::verify() const {
    try {
        const SurfaceParams sp(m);
        for (size_t i = 0; i < s_primes.size(); ++i) {
            if (!is_prime_i64(s_primes[i])) return false;
            if (i > 0 && s_primes[i - 1] >= s_primes[i]) return false;
        }

        // Scale data must be exactly what the search would produce.
        if (device) {
            if (m != 0 || prime_modulus || a != 0 || r != 1) return false;
            if (device->l != detail::device_prime(s_primes)) return false;
            const i64 l = device->l;
            if (device->delta <= 0 || 2 * device->delta >= l) return false;
            if ((device->delta * device->delta + 1) % l != 0) return false;
            if (modulus != l * l) return false;
        } else if (prime_modulus) {
            if (m == 0 || !s_primes.empty() || r != 1) return false;
            if (!detail::prime_scale_ok(sp, a)) return false;
            for (i64 b = detail::prime_scale_floor(sp); b < a; ++b)
                if (detail::prime_scale_ok(sp, b)) return false;
            if (modulus != a * a - m) return false;
        } else {
            if (m == 0) return false;
            const auto [ea, er] = detail::pattern_scale(sp, s_primes);
            if (a != ea || r != er) return false;
            if (modulus != a * r * a * r - m) return false;
        }

        // Targets must match their reconstruction.
        const u64 D = static_cast<u64>(modulus);
        std::vector<std::array<u64, 3>> want;
        if (device) {
            const u64 ul = static_cast<u64>(device->l);
            std::set<std::array<u64, 3>> ts;
            ts.insert({static_cast<u64>(device->delta) * ul % D, ul, 0});
            ts.insert({static_cast<u64>(device->l - device->delta) * ul % D, ul, 0});
            want.assign(ts.begin(), ts.end());
        } else {
            want = detail::coordinate_patterns(a * r, D);
        }
        if (targets != want) return false;

        // Local legs: every prime of the modulus is covered by a passing
        // certificate whose residue hits the expected target.
        const auto factors = factorize_abs_i64(modulus);
        if (lifts.size() != factors.size()) return false;
        for (const auto& [p, e] : factors) {
            const PatternLift* found = nullptr;
            for (const auto& lift : lifts)
                if (lift.p == static_cast<i64>(p)) found = &lift;
            if (!found || found->e != e || found->point.p != found->p) return false;
            if (found->point.k < e || !local_point_ok(sp, found->point)) return false;
            const u64 pe = pow_u64_checked(found->p, e);
            const std::array<u64, 3> res{found->point.xyz[0] % pe, found->point.xyz[1] % pe,
                                         found->point.xyz[2] % pe};
            std::array<u64, 3> expect;
            if (device)
                expect = {static_cast<u64>(device->delta * device->l) % pe,
                          mod_math_u64(device->l, pe), 0};
            else
                expect = {mod_math_u64(a * r, pe), 0, 0};
            if (res != expect) return false;
        }

        // Global legs: representative list, orbit sizes, and disjointness.
        const FundamentalSet fund = fundamental_solutions(sp);
        if (checks.size() != fund.points.size()) return false;
        for (size_t i = 0; i < checks.size(); ++i) {
            if (!(checks[i].rep == fund.points[i]) || !checks[i].disjoint) return false;
            const auto orbit = orbit_mod_n(sp, fund.points[i], D);
            if (orbit.size() != checks[i].orbit_size) return false;
            for (const auto& t : targets)
                if (orbit.count(t)) return false;
        }
        const std::optional<i64> fs = fund.family ? std::optional<i64>(fund.family->s) : std::nullopt;
        if (family_s != fs || !family_disjoint) return false;
        if (family_s)
            for (const auto& t : targets)
                if (detail::family_hits(*family_s, t, D)) return false;
        return true;
    } catch (...) {
        return false;
    }
}

inline std::string SAWitness::json() const {
    std::ostringstream os;
    auto residues = [&os](const std::array<u64, 3>& t) {
        os << "[" << t[0] << ", " << t[1] << ", " << t[2] << "]";
    };
    os << "{\"m\": " << m << ", \"excluded\": [";
    for (i64 p : s_primes) os << p << ", ";
    os << "\"inf\"], \"modulus\": " << modulus << ", \"a\": " << a << ", \"r\": " << r
       << ", \"prime_modulus\": " << (prime_modulus ? "true" : "false") << ", \"device\": ";
    if (device)
        os << "{\"l\": " << device->l << ", \"delta\": " << device->delta << "}";
    else
        os << "null";
    os << ", \"targets\": [";
    for (size_t i = 0; i < targets.size(); ++i) {
        if (i) os << ", ";
        residues(targets[i]);
    }
    os << "], \"lifts\": [";
    for (size_t i = 0; i < lifts.size(); ++i) {
        if (i) os << ", ";
        os << "{\"p\": " << lifts[i].p << ", \"e\": " << lifts[i].e
           << ", \"precision\": " << lifts[i].point.k << ", \"point\": ";
        residues(lifts[i].point.xyz);
        os << "}";
    }
    os << "], \"orbits\": [";
    for (size_t i = 0; i < checks.size(); ++i) {
        if (i) os << ", ";
        os << "{\"rep\": [" << checks[i].rep.x << ", " << checks[i].rep.y << ", "
           << checks[i].rep.z << "], \"size\": " << checks[i].orbit_size
           << ", \"disjoint\": " << (checks[i].disjoint ? "true" : "false") << "}";
    }
    os << "], \"family\": ";
    if (family_s)
        os << "{\"s\": " << *family_s << ", \"disjoint\": " << (family_disjoint ? "true" : "false")
           << "}";
    else
        os << "null";
    os << "}";
    return os.str();
}

}  // namespace markoff
