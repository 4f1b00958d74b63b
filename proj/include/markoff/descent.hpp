// include/markoff/descent.hpp — reduction theory on x^2 + y^2 + z^2 - xyz = m:
// descent of integral points to a fundamental region, exhaustive enumeration of
// the fundamental solutions, existence decisions, and orbit closures modulo N.
#pragma once

#include "markoff/surface.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

namespace markoff {

// ---------------------------------------------------------------------------
// Terminal regions.
//
// Every integral point is equivalent, under coordinate permutations, double
// sign changes, and Vieta involutions, to a triple in one of the following
// regions.  For m > 0: either 3 <= x <= y <= -z, or x lies in {0, 1, 2} (the
// quadratic fibers).  For m < 0 the product xyz is positive and no coordinate
// is smaller than 3 in absolute value, and the region is
// 3 <= x <= y <= z <= xy/2 after making all coordinates positive.

namespace detail {

inline const std::array<GammaLetter, 6> canon_perms = {
    GammaLetter::id,   GammaLetter::s12,  GammaLetter::s13,
    GammaLetter::s23,  GammaLetter::c123, GammaLetter::c132,
};
inline const std::array<GammaLetter, 4> canon_flips = {
    GammaLetter::id, GammaLetter::n12, GammaLetter::n13, GammaLetter::n23,
};

inline bool terminal_ok(const SurfaceParams& sp, const Triple& t) {
    if (sp.m > 0) {
        if (t.x >= 0 && t.x <= 2) return abs(t.y) <= abs(t.z);
        return t.x >= 3 && t.y >= t.x && -t.z >= t.y;
    }
    return t.x >= 3 && t.y >= t.x && t.z >= t.y && 2 * t.z <= t.x * t.y;
}

/** Deterministic tie-breaking order on terminal candidates. */
inline std::tuple<Int, Int, Int, int, int> canon_key(const Triple& t) {
    return {t.x, Int(abs(t.y)), Int(abs(t.z)), t.y < 0 ? 1 : 0, t.z < 0 ? 1 : 0};
}

struct CanonImage {
    Triple t;
    GammaLetter perm = GammaLetter::id;
    GammaLetter flip = GammaLetter::id;
};

/** Best terminal image of t under the 24 permutation/double-sign moves, if any. */
inline std::optional<CanonImage> canonical_terminal(const SurfaceParams& sp, const Triple& t) {
    std::optional<CanonImage> best;
    for (GammaLetter p : canon_perms) {
        const Triple tp = gamma_apply(p, t);
        for (GammaLetter f : canon_flips) {
            const Triple tf = gamma_apply(f, tp);
            if (!terminal_ok(sp, tf)) continue;
            if (!best || canon_key(tf) < canon_key(best->t)) best = CanonImage{tf, p, f};
        }
    }
    return best;
}

/** Some all-positive ascending image of t under the 24 moves, if any. */
inline std::optional<CanonImage> positive_sorted(const Triple& t) {
    for (GammaLetter p : canon_perms) {
        const Triple tp = gamma_apply(p, t);
        for (GammaLetter f : canon_flips) {
            const Triple tf = gamma_apply(f, tp);
            if (tf.x > 0 && tf.y >= tf.x && tf.z >= tf.y) return CanonImage{tf, p, f};
        }
    }
    return std::nullopt;
}

}  // namespace detail

/**
 * Descends an integral point to the terminal region and returns the reduced
 * triple together with a word sending the reduced triple back to the input.
 * Deterministic: the terminal representative minimizes (x, |y|, |z|, signs)
 * among the 24 permutation/sign images that satisfy the region inequalities.
 */
inline std::pair<Triple, GammaWord> reduce_point(const SurfaceParams& sp, const Triple& t0) {
    if (sp.m == 0) throw std::domain_error("reduction needs a nonzero level");
    if (!on_surface(sp, t0)) throw std::domain_error("reduction of a point off the surface");
    Triple cur = t0;
    GammaWord forward;
    auto apply = [&](GammaLetter g) {
        if (g == GammaLetter::id) return;
        cur = gamma_apply(g, cur);
        forward.push_back(g);
    };
    for (int guard = 0; guard < 200000; ++guard) {
        if (auto canon = detail::canonical_terminal(sp, cur)) {
            apply(canon->perm);
            apply(canon->flip);
            GammaWord back;
            back.reserve(forward.size());
            for (auto it = forward.rbegin(); it != forward.rend(); ++it)
                back.push_back(gamma_inverse(*it));
            return {cur, back};
        }
        // Not terminal: the point has all |coordinates| >= 3 and an even number
        // of negative ones, so an all-positive ascending image exists; its top
        // coordinate exceeds xy/2 (otherwise the region test would have
        // accepted it for m < 0, and m > 0 is impossible there), and the Vieta
        // flip z -> xy - z strictly shrinks it.
        auto pos = detail::positive_sorted(cur);
        if (!pos) throw std::logic_error("descent normal form unreachable on-surface");
        apply(pos->perm);
        apply(pos->flip);
        if (2 * cur.z <= cur.x * cur.y)
            throw std::logic_error("descent region inequalities violated");
        apply(GammaLetter::v3);
    }
    throw std::logic_error("descent failed to terminate");
}

/** The x = 2 fiber when d = s^2: the two integer lines z = y +- s. */
struct FiberFamily {
    i64 s = 0;
};

/**
 * All reduced solutions: the finite list of terminal triples, plus the x = 2
 * line family exactly when d is a perfect square.
 */
struct FundamentalSet {
    std::vector<Triple> points;  // sorted, deduplicated, canonical
    std::optional<FiberFamily> family;

    bool empty() const { return points.empty() && !family; }

    /** Membership for outputs of reduce_point over the same level. */
    bool contains(const SurfaceParams& sp, const Triple& reduced) const {
        if (std::binary_search(points.begin(), points.end(), reduced)) return true;
        if (family && reduced.x == 2) {
            const Int diff = reduced.y - reduced.z;
            return diff * diff == sp.d;
        }
        return false;
    }
};

/**
 * Enumerates the complete fundamental set.  The x = 0 and x = 1 fibers are
 * two-square and binary-form representations; x = 2 contributes the line
 * family when d is a perfect square; the regions with smallest coordinate at
 * least 3 are finite and swept with the third coordinate recovered as an
 * integer quadratic root.  m = 0 has exactly the two classical orbits.
 */
inline FundamentalSet fundamental_solutions(const SurfaceParams& sp) {
    if (sp.m == 4) throw std::domain_error("fundamental solutions of a singular level");
    FundamentalSet out;
    if (sp.m == 0) {
        out.points = {Triple{0, 0, 0}, Triple{3, 3, 3}};
        return out;
    }
    std::set<Triple> acc;
    auto push = [&](const Triple& t) {
        if (!on_surface(sp, t)) throw std::logic_error("fundamental candidate off the surface");
        auto canon = detail::canonical_terminal(sp, t);
        if (!canon) throw std::logic_error("fundamental candidate has no terminal form");
        acc.insert(canon->t);
    };
    if (sp.m > 0) {
        // x = 0: y^2 + z^2 = m with 0 <= y <= z.
        for (i64 y = 0; Int(y) * y * 2 <= sp.m; ++y)
            if (auto z = perfect_square_i64(sp.m - y * y)) push({0, y, *z});
        // x = 1: y^2 - yz + z^2 = m - 1, positive definite in (y, z).
        for (i64 y = 0; Int(3) * y * y <= Int(4) * (sp.m - 1); ++y) {
            const Int disc = Int(4) * (sp.m - 1) - Int(3) * y * y;
            const auto s = perfect_square_int(disc);
            if (!s || (Int(y) - *s) % 2 != 0) continue;
            push({1, y, (Int(y) + *s) / 2});
            push({1, y, (Int(y) - *s) / 2});
        }
        // x = 2: (y - z)^2 = d, a line pair exactly when d is a square.
        if (auto s = perfect_square_i64(sp.d)) out.family = FiberFamily{*s};
        // 3 <= x <= y <= -z: all of x^2 + y^2 + z^2 and xy(-z) are positive,
        // so x^3 <= m - 27 and y^2 (x + 2) <= m - x^2.
        for (i64 x = 3; Int(x) * x * x + 27 <= sp.m; ++x)
            for (i64 y = x; Int(x) * x + Int(x + 2) * y * y <= sp.m; ++y) {
                const Int disc = Int(x) * x * y * y - 4 * (Int(x) * x + Int(y) * y - sp.m);
                if (disc < 0) continue;
                const auto s = perfect_square_int(disc);
                if (!s || (Int(x) * y - *s) % 2 != 0) continue;
                const Int z = (Int(x) * y - *s) / 2;  // the negative root
                if (z <= -y) push({x, y, z});
            }
    } else {
        // m < 0: 3 <= x <= y <= z <= xy/2, with x <= sqrt(|m| + 9) and
        // y^2 (x - 2) <= |m| + x^2; z is the smaller quadratic root.
        for (i64 x = 3; Int(x) * x <= Int(9) - sp.m; ++x)
            for (i64 y = x; Int(x - 2) * y * y <= Int(x) * x - sp.m; ++y) {
                const Int disc = Int(x) * x * y * y - 4 * (Int(x) * x + Int(y) * y - sp.m);
                if (disc < 0) continue;
                const auto s = perfect_square_int(disc);
                if (!s || (Int(x) * y - *s) % 2 != 0) continue;
                const Int z = (Int(x) * y - *s) / 2;
                if (z >= y && 2 * z <= Int(x) * y) push({x, y, z});
            }
    }
    out.points.assign(acc.begin(), acc.end());
    return out;
}

/**
 * Decides existence of an integral point, with a witness.  Complete: the
 * descent argument reduces every integral point into the fundamental set.
 */
inline std::optional<Triple> has_integral_point(const SurfaceParams& sp) {
    if (sp.m == 4) throw std::domain_error("integral point decision for the singular cone");
    if (sp.m == 0) return Triple{0, 0, 0};
    const FundamentalSet fs = fundamental_solutions(sp);
    if (!fs.points.empty()) return fs.points.front();
    if (fs.family) return Triple{2, 0, fs.family->s};
    return std::nullopt;
}

/**
 * Closure of t mod N under all twelve symmetry generators acting on residues.
 * Finite BFS over (Z/N)^3.
 */
inline std::set<std::array<u64, 3>> orbit_mod_n(const SurfaceParams& sp, const Triple& t, u64 N) {
    if (N < 2 || N >= (1ull << 31)) throw std::domain_error("orbit modulus out of range");
    if (!on_surface(sp, t)) throw std::domain_error("orbit of a point off the surface");
    auto reduce_mod = [N](const Int& v) {
        Int r = v % Int(N);
        if (r < 0) r += N;
        return r.convert_to<u64>();
    };
    const std::array<u64, 3> start{reduce_mod(t.x), reduce_mod(t.y), reduce_mod(t.z)};
    std::set<std::array<u64, 3>> seen{start};
    std::deque<std::array<u64, 3>> queue{start};
    while (!queue.empty()) {
        const auto cur = queue.front();
        queue.pop_front();
        for (GammaLetter g : gamma_generators) {
            const auto next = gamma_apply_mod(g, cur, N);
            if (seen.insert(next).second) queue.push_back(next);
        }
    }
    return seen;
}

}  // namespace markoff
