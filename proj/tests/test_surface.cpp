// tests/test_surface.cpp — surface parameters, the symmetry action, and Hensel lifting.
#include "markoff/surface.hpp"

#include <catch_amalgamated.hpp>

#include <random>
#include <set>

using namespace markoff;

TEST_CASE("surface membership", "[surface]") {
    CHECK(on_surface(SurfaceParams(5), {0, 1, 2}));
    CHECK(on_surface(SurfaceParams(0), {0, 0, 0}));
    CHECK(on_surface(SurfaceParams(0), {3, 3, 3}));
    CHECK(on_surface(SurfaceParams(54), {3, 3, -3}));
    CHECK(on_surface(SurfaceParams(9), {3, 0, 0}));
    CHECK(!on_surface(SurfaceParams(5), {1, 1, 1}));
}

TEST_CASE("singularity and admissibility", "[surface]") {
    CHECK(SurfaceParams(0).is_singular());
    CHECK(SurfaceParams(4).is_singular());
    CHECK(!SurfaceParams(5).is_singular());
    // 3 mod 4 and +-3 mod 9 are the excluded classes.
    for (i64 m : {3, 7, 11, -1, -5, 12, 21, -12, -21, 30, -30}) {
        INFO("m=" << m);
        CHECK(!is_admissible(m));
    }
    for (i64 m : {0, 1, 2, 5, 8, 9, 13, -4, -7, -8, 54, 342, -334, -863, 1926, 1456}) {
        INFO("m=" << m);
        CHECK(is_admissible(m));
    }
}

TEST_CASE("quadratic class case analysis", "[surface]") {
    CHECK(SurfaceParams(5).brauer_case() == BrauerCase::d_square);    // d = 1
    CHECK(SurfaceParams(8).brauer_case() == BrauerCase::d_square);    // d = 4
    CHECK(SurfaceParams(9).brauer_case() == BrauerCase::m_square);    // m = 3^2, d = 5
    CHECK(SurfaceParams(1).brauer_case() == BrauerCase::m_square);
    CHECK(SurfaceParams(2).brauer_case() == BrauerCase::generic);
    CHECK(SurfaceParams(-4).brauer_case() == BrauerCase::generic);
    CHECK(SurfaceParams(342).brauer_case() == BrauerCase::generic);
    // m*(m-4) = (m-2)^2 - 4 is a perfect square only for the singular m, so the
    // md-square case never arises over the integers.
    for (i64 m = -2000; m <= 2000; ++m) {
        if (m == 0 || m == 4) continue;
        CHECK(SurfaceParams(m).brauer_case() != BrauerCase::md_square);
    }
}

TEST_CASE("generators preserve the surface and satisfy their relations", "[surface]") {
    std::mt19937_64 rng(424242);
    std::vector<std::pair<i64, Triple>> seeds = {
        {5, {0, 1, 2}}, {54, {3, 3, -3}}, {9, {3, 0, 0}}, {-32, {3, 6, 7}}, {8, {2, 5, 7}},
    };
    for (auto& [m, start] : seeds) {
        SurfaceParams sp(m);
        REQUIRE(on_surface(sp, start));
        Triple t = start;
        GammaWord word;
        for (int step = 0; step < 40; ++step) {
            GammaLetter g = gamma_generators[rng() % gamma_generators.size()];
            word.push_back(g);
            t = gamma_apply(g, t);
            REQUIRE(on_surface(sp, t));
        }
        // Undo with the reversed inverse word.
        GammaWord back;
        for (auto it = word.rbegin(); it != word.rend(); ++it) back.push_back(gamma_inverse(*it));
        CHECK(gamma_apply(back, t) == start);
    }
    // Involutions and the 3-cycle pair.
    Triple t{3, 6, 7};
    for (GammaLetter g : gamma_generators) {
        if (g == GammaLetter::c123 || g == GammaLetter::c132) continue;
        CHECK(gamma_apply(g, gamma_apply(g, t)) == t);
    }
    CHECK(gamma_apply(GammaLetter::c132, gamma_apply(GammaLetter::c123, t)) == t);
}

TEST_CASE("modular action matches the integral action", "[surface]") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        u64 n = rng() % 9999 + 2;
        Triple t{static_cast<i64>(rng() % 1000), static_cast<i64>(rng() % 1000),
                 static_cast<i64>(rng() % 1000)};
        std::array<u64, 3> r{static_cast<u64>(t.x), static_cast<u64>(t.y), static_cast<u64>(t.z)};
        GammaLetter g = gamma_generators[rng() % gamma_generators.size()];
        Triple ti = gamma_apply(g, t);
        auto rm = gamma_apply_mod(g, {r[0] % n, r[1] % n, r[2] % n}, n);
        CHECK(Int(rm[0]) == mod_math(checked_i64(ti.x % n), static_cast<i64>(n)));
        CHECK(Int(rm[1]) == mod_math(checked_i64(ti.y % n), static_cast<i64>(n)));
        CHECK(Int(rm[2]) == mod_math(checked_i64(ti.z % n), static_cast<i64>(n)));
    }
}

namespace {

// Brute-force: does some residue class mod p^3 above the seed satisfy the
// equation with a unit partial derivative (which certifies a Z_p point)?
bool smooth_class_above_seed(const SurfaceParams& sp, i64 p, const std::array<u64, 3>& seed) {
    u64 M = static_cast<u64>(p) * p * p;
    ModSurface S(sp, M);
    for (u64 x = seed[0]; x < M; x += p)
        for (u64 y = seed[1]; y < M; y += p)
            for (u64 z = seed[2]; z < M; z += p) {
                if (S.f(x, y, z) != 0) continue;
                if (S.fx(x, y, z) % p != 0 || S.fy(x, y, z) % p != 0 || S.fz(x, y, z) % p != 0)
                    return true;
            }
    return false;
}

}  // namespace

TEST_CASE("hensel lifting certifies exactly the liftable seeds", "[surface]") {
    for (i64 m : {5, 9, 2, -4, 54, 260}) {
        SurfaceParams sp(m);
        for (i64 p : {3, 5}) {
            u64 up = static_cast<u64>(p);
            ModSurface S1(sp, up);
            for (u64 x = 0; x < up; ++x)
                for (u64 y = 0; y < up; ++y)
                    for (u64 z = 0; z < up; ++z) {
                        if (S1.f(x, y, z) != 0) continue;
                        INFO("m=" << m << " p=" << p << " seed=(" << x << "," << y << "," << z << ")");
                        auto pt = hensel_lift_point(sp, p, {x, y, z}, 6);
                        if (pt) {
                            CHECK(local_point_ok(sp, *pt));
                            CHECK(pt->k >= 6);
                            CHECK(pt->xyz[0] % up == x);
                            CHECK(pt->xyz[1] % up == y);
                            CHECK(pt->xyz[2] % up == z);
                        } else {
                            // No point may then exist above the seed even at depth 3.
                            CHECK(!smooth_class_above_seed(sp, p, {x, y, z}));
                        }
                    }
        }
    }
    SurfaceParams sp9(9);
    CHECK(!hensel_lift_point(sp9, 5, {2, 2, 2}, 4).has_value());
    CHECK_THROWS(hensel_lift_point(sp9, 5, {1, 1, 1}, 4));  // not on the surface mod 5
}
