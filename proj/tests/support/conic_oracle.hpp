// tests/support/conic_oracle.hpp — independent solvability oracle for z^2 = a x^2 + b y^2
// over completions of Q, by brute-force residue search with smoothness certificates.
// Used to cross-check the closed-form Hilbert symbol; deliberately shares no code with it.
#pragma once

#include "markoff/numeric.hpp"
#include "markoff/padic.hpp"

#include <deque>

namespace markoff::testsupport {

/** Over R: a nontrivial solution exists unless both coefficients are negative. */
inline bool conic_solvable_real(i64 a, i64 b) { return a > 0 || b > 0; }

namespace detail {

struct Node {
    std::array<u64, 3> xyz;  // residues mod p^level
    int level;
};

inline u64 mod_u64(i64 v, u64 M) {
    i64 r = v % static_cast<i64>(M);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(M) : r);
}

inline int res_ord(u64 r, i64 p, int level) {
    if (r == 0) return level;
    int v = 0;
    while (r % static_cast<u64>(p) == 0) { r /= static_cast<u64>(p); ++v; }
    return v;
}

}  // namespace detail

/**
 * Decides solvability of z^2 = a x^2 + b y^2 over Q_p by residue search.
 * Primitive solutions mod p are refined level by level; a branch proves
 * solvability once a partial derivative has exact valuation v at level > 2v
 * (Newton's lemma) or once it survives to level K = v_p(4ab) + 3, the
 * classical completeness bound for quadratic forms (square factors of p are
 * first removed from a and b, which only rescales solutions).  If every
 * branch dies before level K there is no solution.
 */
inline bool conic_solvable_qp(i64 a, i64 b, i64 p) {
    if (a == 0 || b == 0) throw std::domain_error("conic oracle needs nonzero coefficients");
    while (a % (p * p) == 0) a /= p * p;
    while (b % (p * p) == 0) b /= p * p;

    const int K = valuation_i64(4 * a * b, p) + 3;
    const u64 up = static_cast<u64>(p);

    auto gval = [&](const std::array<u64, 3>& t, u64 M) {
        u64 am = detail::mod_u64(a, M), bm = detail::mod_u64(b, M);
        u64 s = mulmod(t[2], t[2], M);
        s = (s + M - mulmod(am, mulmod(t[0], t[0], M), M)) % M;
        s = (s + M - mulmod(bm, mulmod(t[1], t[1], M), M)) % M;
        return s;
    };
    auto grad = [&](const std::array<u64, 3>& t, u64 M) {
        u64 am = detail::mod_u64(a, M), bm = detail::mod_u64(b, M);
        return std::array<u64, 3>{(M - mulmod(2 * am % M, t[0], M)) % M,
                                  (M - mulmod(2 * bm % M, t[1], M)) % M, 2 * t[2] % M};
    };

    std::deque<detail::Node> queue;
    // Returns true when the node settles the question; otherwise queues children.
    auto process = [&](const detail::Node& node) -> bool {
        u64 M = pow_u64_checked(p, node.level);
        auto der = grad(node.xyz, M);
        for (u64 di : der) {
            if (di == 0) continue;
            if (node.level > 2 * detail::res_ord(di, p, node.level)) return true;
        }
        if (node.level >= K) return true;  // survived to the completeness bound
        u64 M1 = pow_u64_checked(p, node.level + 1);
        u64 g = (gval(node.xyz, M1) / M) % up;
        u64 gx = der[0] % up, gy = der[1] % up, gz = der[2] % up;
        if (gx == 0 && gy == 0 && gz == 0) {
            if (g != 0) return false;  // branch dies
            for (u64 aa = 0; aa < up; ++aa)
                for (u64 bb = 0; bb < up; ++bb)
                    for (u64 cc = 0; cc < up; ++cc)
                        queue.push_back({{node.xyz[0] + aa * M, node.xyz[1] + bb * M,
                                          node.xyz[2] + cc * M},
                                         node.level + 1});
        } else {
            int pivot = gx != 0 ? 0 : (gy != 0 ? 1 : 2);
            u64 gp = pivot == 0 ? gx : pivot == 1 ? gy : gz;
            u64 inv = inv_mod_u64(gp, up);
            for (u64 aa = 0; aa < up; ++aa)
                for (u64 bb = 0; bb < up; ++bb) {
                    std::array<u64, 3> dig{};
                    u64 rest;
                    if (pivot == 0) { dig[1] = aa; dig[2] = bb; rest = (g + gy * aa + gz * bb) % up; }
                    else if (pivot == 1) { dig[0] = aa; dig[2] = bb; rest = (g + gx * aa + gz * bb) % up; }
                    else { dig[0] = aa; dig[1] = bb; rest = (g + gx * aa + gy * bb) % up; }
                    dig[pivot] = mulmod((up - rest) % up, inv, up);
                    queue.push_back({{node.xyz[0] + dig[0] * M, node.xyz[1] + dig[1] * M,
                                      node.xyz[2] + dig[2] * M},
                                     node.level + 1});
                }
        }
        return false;
    };

    if (p == 2) {
        for (u64 x = 0; x < 2; ++x)
            for (u64 y = 0; y < 2; ++y)
                for (u64 z = 0; z < 2; ++z) {
                    if (x == 0 && y == 0 && z == 0) continue;
                    if (gval({x, y, z}, 2) != 0) continue;
                    if (process({{x, y, z}, 1})) return true;
                }
    } else {
        // sqrt table mod p for the level-1 sweep; certificates usually fire on
        // the first few (x, y), so generation is interleaved with processing.
        std::vector<i64> root(up, -1);
        for (u64 z = 0; z < up; ++z) root[mulmod(z, z, up)] = static_cast<i64>(z);
        for (u64 x = 0; x < up; ++x)
            for (u64 y = 0; y < up; ++y) {
                if (x == 0 && y == 0) continue;  // z would be 0: non-primitive
                u64 rhs = (mulmod(detail::mod_u64(a, up), mulmod(x, x, up), up) +
                           mulmod(detail::mod_u64(b, up), mulmod(y, y, up), up)) % up;
                i64 z0 = root[rhs];
                if (z0 < 0) continue;
                if (process({{x, y, static_cast<u64>(z0)}, 1})) return true;
                if (z0 != 0 && process({{x, y, up - static_cast<u64>(z0)}, 1})) return true;
            }
        // (0, 0, 0) is excluded; (x, y) = (0, 0) forces z = 0 mod p, which is
        // the non-primitive class, so the sweep above is complete.
    }

    while (!queue.empty()) {
        detail::Node node = queue.front();
        queue.pop_front();
        if (process(node)) return true;
    }
    return false;
}

/** The oracle's verdict as an additive Hilbert value. */
inline Half conic_hilbert(i64 a, i64 b, Place v) {
    bool solvable = v.is_real() ? conic_solvable_real(a, b) : conic_solvable_qp(a, b, v.p);
    return Half(solvable ? 0 : 1);
}

}  // namespace markoff::testsupport
