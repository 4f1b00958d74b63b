// include/markoff/real_locus.hpp — connected components of the real surface
// x^2 + y^2 + z^2 - xyz = m: count, explicit component ids, membership
// classification by exact sign tests, and component sample points.
#pragma once

#include "markoff/surface.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace markoff {

/**
 * The real surface is connected for m >= 4; for 0 <= m < 4 it has a bounded
 * piece inside |x|, |y| <= 2 plus four unbounded quadrant pieces; for m < 0
 * only the four quadrant pieces remain.  Quadrant labels give the signs of
 * x and y (both of absolute value > 2 there).
 */
enum class RealComponent { whole, bounded, quad_pp, quad_pm, quad_mp, quad_mm };

inline const char* real_component_name(RealComponent c) {
    switch (c) {
        case RealComponent::whole: return "whole";
        case RealComponent::bounded: return "bounded";
        case RealComponent::quad_pp: return "x>2,y>2";
        case RealComponent::quad_pm: return "x>2,y<-2";
        case RealComponent::quad_mp: return "x<-2,y>2";
        case RealComponent::quad_mm: return "x<-2,y<-2";
    }
    throw std::logic_error("unknown real component");
}

/** Number of connected components of the real surface (singular m allowed). */
inline int component_count(const SurfaceParams& sp) {
    if (sp.m >= 4) return 1;
    return sp.m >= 0 ? 5 : 4;
}

/** The component ids present at this level, in a fixed order. */
inline std::vector<RealComponent> real_components(const SurfaceParams& sp) {
    if (sp.m >= 4) return {RealComponent::whole};
    std::vector<RealComponent> out;
    if (sp.m >= 0) out.push_back(RealComponent::bounded);
    out.insert(out.end(), {RealComponent::quad_pp, RealComponent::quad_pm,
                           RealComponent::quad_mp, RealComponent::quad_mm});
    return out;
}

/**
 * A real surface point with rational (x, y).  The third coordinate is either
 * an exact rational or one of the two conjugate roots of the fiber quadratic
 * z^2 - xyz + (x^2 + y^2 - m), selected by branch (+1 larger, -1 smaller).
 * Component membership needs only robust signs, so the root never has to be
 * evaluated numerically.
 */
struct RealPoint {
    Rat x{0}, y{0};
    std::optional<Rat> z;
    int branch = 1;
};

/** (x^2 - 4)(y^2 - 4) + 4d: nonnegative exactly when the (x, y) fiber is real. */
inline Rat real_fiber_disc(const SurfaceParams& sp, const Rat& x, const Rat& y) {
    return (x * x - Rat(4)) * (y * y - Rat(4)) + Rat(4) * Rat(sp.d);
}

/**
 * Classifies an on-surface real point into its connected component using only
 * exact sign tests of x -+ 2 and y -+ 2.  Points given with an exact z must
 * satisfy the equation exactly; root-selected points must have a real fiber.
 */
inline RealComponent component_of(const SurfaceParams& sp, const RealPoint& pt) {
    if (pt.z) {
        const Rat f =
            pt.x * pt.x + pt.y * pt.y + *pt.z * *pt.z - pt.x * pt.y * *pt.z - Rat(sp.m);
        if (f != Rat(0)) throw std::domain_error("real point off the surface");
    } else {
        if (pt.branch != 1 && pt.branch != -1)
            throw std::domain_error("root branch must be +1 or -1");
        if (real_fiber_disc(sp, pt.x, pt.y) < Rat(0))
            throw std::domain_error("no real fiber over (x, y)");
    }
    if (sp.m >= 4) return RealComponent::whole;
    const bool xp = pt.x > Rat(2), xm = pt.x < Rat(-2);
    const bool yp = pt.y > Rat(2), ym = pt.y < Rat(-2);
    if (!xp && !xm) {
        // |x| <= 2 forces |y| <= 2 (the fiber condition fails on the mixed
        // strips), which is the bounded piece; it exists only for m >= 0.
        if (yp || ym || sp.m < 0)
            throw std::logic_error("sign pattern impossible on the real surface");
        return RealComponent::bounded;
    }
    if (!yp && !ym) throw std::logic_error("sign pattern impossible on the real surface");
    if (xp) return yp ? RealComponent::quad_pp : RealComponent::quad_pm;
    return yp ? RealComponent::quad_mp : RealComponent::quad_mm;
}

/** A certified sample point inside the requested component. */
inline RealPoint sample_real_point(const SurfaceParams& sp, RealComponent c) {
    const auto present = real_components(sp);
    if (std::find(present.begin(), present.end(), c) == present.end())
        throw std::domain_error("component not present at this level");
    if (c == RealComponent::whole) return {Rat(2), Rat(2), std::nullopt, 1};
    if (c == RealComponent::bounded) return {Rat(0), Rat(0), std::nullopt, 1};
    // Quadrants: a = 3 + floor(sqrt(|d|)) gives (a^2 - 4)^2 >= (|d| + 5)^2 >= 4|d|.
    const i64 a = 3 + i64(isqrt_u64(u64(4 - sp.m)));
    const i64 sx = (c == RealComponent::quad_pp || c == RealComponent::quad_pm) ? 1 : -1;
    const i64 sy = (c == RealComponent::quad_pp || c == RealComponent::quad_mp) ? 1 : -1;
    return {Rat(sx * a), Rat(sy * a), std::nullopt, 1};
}

}  // namespace markoff
