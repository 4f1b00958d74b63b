// include/markoff/surface.hpp — the surface x^2+y^2+z^2-xyz = m: parameters, integral
// triples, the symmetry group action, and p-adic points with lifting certificates.
#pragma once

#include "markoff/padic.hpp"

#include <array>
#include <cstdlib>
#include <deque>
#include <sstream>

namespace markoff {

/**
 * Shape of the pair of quadratic classes (m, d = m-4) in Q^x / squares.
 * Drives both the Brauer group basis and the Galois-module tables.
 */
enum class BrauerCase {
    generic,    // none of d, m, md is a rational square
    m_square,   // m is a nonzero square (and d is not)
    md_square,  // md is a square but neither m nor d is
    d_square,   // d is a nonzero square
};

inline const char* brauer_case_name(BrauerCase c) {
    switch (c) {
        case BrauerCase::generic: return "generic";
        case BrauerCase::m_square: return "m-square";
        case BrauerCase::md_square: return "md-square";
        case BrauerCase::d_square: return "d-square";
    }
    return "?";
}

/** Parameters of one surface; m is the level, d = m - 4 its shifted form. */
struct SurfaceParams {
    i64 m = 0;
    i64 d = -4;

    SurfaceParams() = default;
    explicit SurfaceParams(i64 level) : m(level), d(level - 4) {}

    /** The affine surface is singular exactly for m in {0, 4}. */
    bool is_singular() const { return m == 0 || m == 4; }

    std::optional<i64> sqrt_m() const { return perfect_square_i64(m); }
    std::optional<i64> sqrt_d() const { return perfect_square_i64(d); }

    BrauerCase brauer_case() const {
        if (is_singular()) throw std::domain_error("brauer case of a singular surface");
        if (sqrt_d()) return BrauerCase::d_square;
        if (sqrt_m()) return BrauerCase::m_square;
        Int md = Int(m) * Int(d);
        if (md > 0 && perfect_square_int(md)) return BrauerCase::md_square;
        return BrauerCase::generic;
    }
};

/**
 * Everywhere-local solvability over Z: integral points exist in every Z_p and
 * R exactly when m is not 3 mod 4 and not +-3 mod 9.
 */
inline bool is_admissible(i64 m) {
    if (mod_math(m, 4) == 3) return false;
    i64 r9 = mod_math(m, 9);
    return r9 != 3 && r9 != 6;
}

/** An integral (or big-integer) point candidate. */
struct Triple {
    Int x, y, z;

    Triple() = default;
    Triple(Int a, Int b, Int c) : x(std::move(a)), y(std::move(b)), z(std::move(c)) {}

    friend bool operator==(const Triple& a, const Triple& b) {
        return a.x == b.x && a.y == b.y && a.z == b.z;
    }
    friend bool operator<(const Triple& a, const Triple& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.z < b.z;
    }

    std::string str() const {
        std::ostringstream os;
        os << "(" << x << ", " << y << ", " << z << ")";
        return os.str();
    }
};

inline Int surface_form(const Triple& t, i64 m) {
    return t.x * t.x + t.y * t.y + t.z * t.z - t.x * t.y * t.z - m;
}

inline bool on_surface(const SurfaceParams& sp, const Triple& t) {
    return surface_form(t, sp.m) == 0;
}

/**
 * Generators of the symmetry group: the three Vieta involutions, the three
 * double sign changes, and the six coordinate permutations.
 */
enum class GammaLetter {
    v1, v2, v3,        // Vieta flips: replace one coordinate by the other quadratic root
    n12, n13, n23,     // negate the named pair of coordinates
    id, s12, s13, s23, // permutations ...
    c123, c132,        // ... including the two 3-cycles (x,y,z)->(y,z,x) and inverse
};

inline constexpr std::array<GammaLetter, 12> gamma_generators = {
    GammaLetter::v1,  GammaLetter::v2,  GammaLetter::v3,  GammaLetter::n12,
    GammaLetter::n13, GammaLetter::n23, GammaLetter::id,  GammaLetter::s12,
    GammaLetter::s13, GammaLetter::s23, GammaLetter::c123, GammaLetter::c132,
};

using GammaWord = std::vector<GammaLetter>;

inline GammaLetter gamma_inverse(GammaLetter g) {
    if (g == GammaLetter::c123) return GammaLetter::c132;
    if (g == GammaLetter::c132) return GammaLetter::c123;
    return g;  // all other generators are involutions
}

inline const char* gamma_name(GammaLetter g) {
    switch (g) {
        case GammaLetter::v1: return "V1";
        case GammaLetter::v2: return "V2";
        case GammaLetter::v3: return "V3";
        case GammaLetter::n12: return "N12";
        case GammaLetter::n13: return "N13";
        case GammaLetter::n23: return "N23";
        case GammaLetter::id: return "Id";
        case GammaLetter::s12: return "S12";
        case GammaLetter::s13: return "S13";
        case GammaLetter::s23: return "S23";
        case GammaLetter::c123: return "C123";
        case GammaLetter::c132: return "C132";
    }
    return "?";
}

inline Triple gamma_apply(GammaLetter g, const Triple& t) {
    const Int &x = t.x, &y = t.y, &z = t.z;
    switch (g) {
        case GammaLetter::v1: return {y * z - x, y, z};
        case GammaLetter::v2: return {x, x * z - y, z};
        case GammaLetter::v3: return {x, y, x * y - z};
        case GammaLetter::n12: return {-x, -y, z};
        case GammaLetter::n13: return {-x, y, -z};
        case GammaLetter::n23: return {x, -y, -z};
        case GammaLetter::id: return t;
        case GammaLetter::s12: return {y, x, z};
        case GammaLetter::s13: return {z, y, x};
        case GammaLetter::s23: return {x, z, y};
        case GammaLetter::c123: return {y, z, x};
        case GammaLetter::c132: return {z, x, y};
    }
    return t;
}

/** Applies the word left to right. */
inline Triple gamma_apply(const GammaWord& w, Triple t) {
    for (GammaLetter g : w) t = gamma_apply(g, t);
    return t;
}

/** Same action on residues modulo n (n < 2^31 so products stay in range). */
inline std::array<u64, 3> gamma_apply_mod(GammaLetter g, const std::array<u64, 3>& t, u64 n) {
    auto neg = [n](u64 v) { return v == 0 ? 0 : n - v; };
    const u64 x = t[0], y = t[1], z = t[2];
    switch (g) {
        case GammaLetter::v1: return {(mulmod(y, z, n) + neg(x)) % n, y, z};
        case GammaLetter::v2: return {x, (mulmod(x, z, n) + neg(y)) % n, z};
        case GammaLetter::v3: return {x, y, (mulmod(x, y, n) + neg(z)) % n};
        case GammaLetter::n12: return {neg(x), neg(y), z};
        case GammaLetter::n13: return {neg(x), y, neg(z)};
        case GammaLetter::n23: return {x, neg(y), neg(z)};
        case GammaLetter::id: return t;
        case GammaLetter::s12: return {y, x, z};
        case GammaLetter::s13: return {z, y, x};
        case GammaLetter::s23: return {x, z, y};
        case GammaLetter::c123: return {y, z, x};
        case GammaLetter::c132: return {z, x, y};
    }
    return t;
}

// ---------------------------------------------------------------------------
// Arithmetic on residues mod p^k (moduli are kept below 2^62).

inline u64 mod_math_u64(i64 a, u64 n) {
    i64 r = a % static_cast<i64>(n);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(n) : r);
}

/** f and its gradient on residues modulo M. */
struct ModSurface {
    u64 M;
    u64 m_mod;

    ModSurface(const SurfaceParams& sp, u64 modulus) : M(modulus), m_mod(mod_math_u64(sp.m, modulus)) {}

    u64 f(u64 x, u64 y, u64 z) const {
        u64 s = (mulmod(x, x, M) + mulmod(y, y, M)) % M;
        s = (s + mulmod(z, z, M)) % M;
        u64 xyz = mulmod(mulmod(x, y, M), z, M);
        return (s + M - xyz + M - m_mod) % M;
    }
    u64 fx(u64 x, u64 y, u64 z) const { return (2 * x % M + M - mulmod(y, z, M)) % M; }
    u64 fy(u64 x, u64 y, u64 z) const { return (2 * y % M + M - mulmod(x, z, M)) % M; }
    u64 fz(u64 x, u64 y, u64 z) const { return (2 * z % M + M - mulmod(x, y, M)) % M; }
};

/**
 * A p-adic point known to the stated precision together with a smoothness
 * certificate: residues (x, y, z) mod p^k with f = 0 mod p^k, and an index i
 * with v = ord_p(df/dx_i) satisfying k > 2v, so the residue class contains an
 * exact Z_p point (Newton's lemma).
 */
struct LocalPoint {
    i64 p = 0;
    int k = 0;
    std::array<u64, 3> xyz{0, 0, 0};
    int cert_index = 0;      // which partial derivative certifies
    int cert_valuation = 0;  // its valuation v, with k > 2v
};

/** Default working precision for value-set work at p. */
inline int working_precision(const SurfaceParams& sp, i64 p) {
    int vd = sp.d == 0 ? 0 : valuation_i64(sp.d, p);
    if (p == 2) return 2 * (2 + vd) + 6;
    return 2 * vd + 3;
}

/**
 * Hard refinement ceiling.  Refining past this level aborts with a precision
 * error; MARKOFF_PRECISION_CAP overrides the default.
 */
inline int precision_cap(const SurfaceParams& sp, i64 p) {
    if (const char* env = std::getenv("MARKOFF_PRECISION_CAP")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    int vd = sp.d == 0 ? 0 : valuation_i64(sp.d, p);
    int cap = (p == 2 ? 2 : 0) + 2 * vd + 8;
    if (auto t = sp.sqrt_m()) {
        // When m = t^2 the class of x - t is read off near the point (t, 0, 0)
        // through its companion representative, which only separates from it at
        // depth ~ 2 v_p(2t); leave room for that.
        if (*t != 0) cap = std::max(cap, 2 * valuation_i64(2 * *t, p) + 8);
    }
    return std::max(cap, working_precision(sp, p) + 4);
}

inline int ord_of_residue(u64 r, i64 p, int level) {
    // Valuation of a residue known mod p^level; returns level when r = 0 there.
    if (r == 0) return level;
    int v = 0;
    while (r % static_cast<u64>(p) == 0) { r /= static_cast<u64>(p); ++v; }
    return v;
}

/**
 * Checks a LocalPoint's certificate by recomputation: the equation holds to
 * precision k and the named partial has exact valuation v < k with k > 2v.
 */
inline bool local_point_ok(const SurfaceParams& sp, const LocalPoint& pt) {
    u64 M = pow_u64_checked(pt.p, pt.k);
    ModSurface S(sp, M);
    if (S.f(pt.xyz[0], pt.xyz[1], pt.xyz[2]) != 0) return false;
    u64 der = pt.cert_index == 0   ? S.fx(pt.xyz[0], pt.xyz[1], pt.xyz[2])
              : pt.cert_index == 1 ? S.fy(pt.xyz[0], pt.xyz[1], pt.xyz[2])
                                   : S.fz(pt.xyz[0], pt.xyz[1], pt.xyz[2]);
    int v = ord_of_residue(der, pt.p, pt.k);
    return v == pt.cert_valuation && pt.k > 2 * v;
}

namespace detail {

struct DiskNode {
    std::array<u64, 3> xyz;
    int level;
};

/** All digit vectors (a,b,c) with g + <grad, (a,b,c)> = 0 mod p, as children of a node. */
template <typename Fn>
inline void expand_children(const std::array<u64, 3>& xyz, int level, i64 p, u64 g,
                            const std::array<u64, 3>& grad_mod_p, u64 step, Fn&& emit) {
    const u64 up = static_cast<u64>(p);
    const u64 gx = grad_mod_p[0] % up, gy = grad_mod_p[1] % up, gz = grad_mod_p[2] % up;
    if (gx == 0 && gy == 0 && gz == 0) {
        if (g % up != 0) return;  // no residue solutions above this disk
        for (u64 a = 0; a < up; ++a)
            for (u64 b = 0; b < up; ++b)
                for (u64 c = 0; c < up; ++c)
                    emit(std::array<u64, 3>{xyz[0] + a * step, xyz[1] + b * step, xyz[2] + c * step});
        return;
    }
    // Pick a pivot coordinate with a unit digit-coefficient and solve for it.
    int pivot = gx != 0 ? 0 : (gy != 0 ? 1 : 2);
    u64 inv = inv_mod_u64(pivot == 0 ? gx : pivot == 1 ? gy : gz, up);
    for (u64 a = 0; a < up; ++a) {
        for (u64 b = 0; b < up; ++b) {
            // a, b are the digits of the two non-pivot coordinates.
            u64 rest;
            std::array<u64, 3> digits{};
            if (pivot == 0) { digits[1] = a; digits[2] = b; rest = (g + gy * a + gz * b) % up; }
            else if (pivot == 1) { digits[0] = a; digits[2] = b; rest = (g + gx * a + gz * b) % up; }
            else { digits[0] = a; digits[1] = b; rest = (g + gx * a + gy * b) % up; }
            digits[pivot] = mulmod((up - rest) % up, inv, up);
            emit(std::array<u64, 3>{xyz[0] + digits[0] * step, xyz[1] + digits[1] * step,
                                    xyz[2] + digits[2] * step});
        }
    }
}

/**
 * Children of a residue disk: the disks one level deeper that can still
 * contain Z_p points.  Where the gradient has positive minimal valuation w
 * (near a singular reduction), second-order digit terms sit at valuation
 * 2*level and are invisible mod p^(level+w+1) once level >= w + 1, so the
 * children are cut out by a plane over the rescaled gradient grad/p^w with
 * target f/p^(level+w); a disk failing the deeper congruence
 * f = 0 mod p^(level+w) contains no points at all and emits nothing.  At
 * level <= w every digit cube entry stays consistent, gated by
 * f = 0 mod p^(level+1).  `der` holds the partials as residues mod p^level.
 */
template <typename Fn>
inline void refine_disk(const SurfaceParams& sp, const std::array<u64, 3>& xyz, int level, i64 p,
                        const std::array<u64, 3>& der, Fn&& emit) {
    const u64 up = static_cast<u64>(p);
    const u64 M = pow_u64_checked(p, level);
    int w = level;
    for (int i = 0; i < 3; ++i) w = std::min(w, ord_of_residue(der[i], p, level));
    if (level >= w + 1) {
        const u64 pw = pow_u64_checked(p, w);
        ModSurface SD(sp, pow_u64_checked(p, level + w + 1));
        const u64 fval = SD.f(xyz[0], xyz[1], xyz[2]);
        const u64 Mgate = pow_u64_checked(p, level + w);
        if (fval % Mgate != 0) return;
        const u64 g = (fval / Mgate) % up;
        const std::array<u64, 3> grad{(der[0] / pw) % up, (der[1] / pw) % up, (der[2] / pw) % up};
        expand_children(xyz, level, p, g, grad, M, emit);
        return;
    }
    ModSurface S1(sp, pow_u64_checked(p, level + 1));
    if (S1.f(xyz[0], xyz[1], xyz[2]) != 0) return;
    expand_children(xyz, level, p, 0, {0, 0, 0}, M, emit);
}

}  // namespace detail

/**
 * Lifts a mod-p solution to a certified point at precision k.  Returns nothing
 * when no Z_p point reduces into the seed's residue class (e.g. an isolated
 * singular seed); raises a precision error if the refinement ceiling is hit
 * while candidates are still alive.
 */
inline std::optional<LocalPoint> hensel_lift_point(const SurfaceParams& sp, i64 p,
                                                   std::array<u64, 3> seed, int k) {
    const int cap = std::max(precision_cap(sp, p), k);
    {
        ModSurface S1(sp, static_cast<u64>(p));
        if (S1.f(seed[0] % p, seed[1] % p, seed[2] % p) != 0)
            throw std::domain_error("seed does not satisfy the equation mod p");
    }
    u64 budget = 10'000'000;
    std::deque<detail::DiskNode> queue{{{seed[0] % p, seed[1] % p, seed[2] % p}, 1}};
    while (!queue.empty()) {
        detail::DiskNode node = queue.front();
        queue.pop_front();
        u64 Mj = pow_u64_checked(p, node.level);
        ModSurface S(sp, Mj);
        const auto [x, y, z] = node.xyz;
        std::array<u64, 3> der{S.fx(x, y, z), S.fy(x, y, z), S.fz(x, y, z)};
        // Certified as soon as one partial has exact valuation v with level > 2v.
        for (int i = 0; i < 3; ++i) {
            if (der[i] == 0) continue;
            int v = ord_of_residue(der[i], p, node.level);
            if (node.level > 2 * v) {
                // Newton-polish coordinate i up to precision k.
                int kk = std::max(k, node.level);
                u64 M = pow_u64_checked(p, kk);
                ModSurface SK(sp, M);
                std::array<u64, 3> cur{x % M, y % M, z % M};
                u64 pv = pow_u64_checked(p, v);
                for (int guard = 0; guard < 4 * kk + 8; ++guard) {
                    u64 fv = SK.f(cur[0], cur[1], cur[2]);
                    if (fv == 0) break;
                    u64 di = i == 0   ? SK.fx(cur[0], cur[1], cur[2])
                             : i == 1 ? SK.fy(cur[0], cur[1], cur[2])
                                      : SK.fz(cur[0], cur[1], cur[2]);
                    // di = p^v * unit; divide the Newton step exactly.
                    u64 unit = (di / pv) % M;
                    u64 stepv = mulmod(fv / pv % M, inv_mod_u64(unit % M, M), M);
                    cur[i] = (cur[i] + M - stepv) % M;
                }
                if (SK.f(cur[0], cur[1], cur[2]) != 0)
                    throw std::runtime_error("newton refinement failed to converge");
                LocalPoint out{p, kk, cur, i, v};
                if (!local_point_ok(sp, out))
                    throw std::runtime_error("lift certificate failed recheck");
                return out;
            }
        }
        if (node.level >= cap)
            throw std::overflow_error("precision cap exceeded while lifting a local point");
        // Refine one level.
        detail::refine_disk(sp, node.xyz, node.level, p, der,
                            [&](const std::array<u64, 3>& child) {
                                if (budget == 0) throw std::overflow_error("enumeration budget exceeded");
                                --budget;
                                queue.push_back({child, node.level + 1});
                            });
    }
    return std::nullopt;
}

}  // namespace markoff
