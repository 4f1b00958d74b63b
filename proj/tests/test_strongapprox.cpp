// Density-failure witnesses: smallest admissible scales, target sets closed
// under the symmetry group, certified local legs, orbit disjointness, the
// square-residue device at the cone level, and prime-level non-surjectivity.
#include <catch2/catch_amalgamated.hpp>

#include "markoff/strongapprox.hpp"

#include <random>
#include <set>

using namespace markoff;

namespace {

Triple tr(i64 a, i64 b, i64 c) { return Triple{Int(a), Int(b), Int(c)}; }

std::array<u64, 3> reduce_mod(const Triple& t, u64 n) {
    auto one = [n](const Int& v) {
        Int r = v % Int(n);
        if (r < 0) r += n;
        return r.convert_to<u64>();
    };
    return {one(t.x), one(t.y), one(t.z)};
}

std::set<std::array<u64, 3>> target_set(const SAWitness& w) {
    return {w.targets.begin(), w.targets.end()};
}

/** Independent restatement of the prime-level scale conditions. */
bool prime_scale_fits(i64 m, i64 a) {
    const i64 l = a * a - m;
    if (a * a <= (m < 0 ? -m : m) + 9) return false;
    if (a * a - 2 * a - m < 0) return false;
    return l >= 2 && is_prime_i64(l) && std::gcd(l, 2 * a) == 1;
}

}  // namespace

TEST_CASE("witnesses pick the smallest admissible scale", "[strongapprox]") {
    struct Row {
        i64 m;
        std::vector<i64> excluded;
        i64 a, r, modulus;
        size_t lifts, reps;
        std::optional<i64> family_s;
    };
    const std::vector<Row> rows = {
        {5, {2}, 2, 2, 11, 1, 2, 1},      {1, {2}, 2, 2, 15, 2, 1, std::nullopt},
        {2, {2}, 5, 1, 23, 1, 2, std::nullopt}, {8, {2}, 5, 1, 17, 1, 4, 2},
        {12, {2}, 5, 1, 13, 1, 0, std::nullopt}, {-4, {2}, 5, 1, 29, 1, 0, std::nullopt},
        {-2, {2}, 5, 1, 27, 1, 1, std::nullopt}, {-2, {3}, 3, 3, 83, 1, 1, std::nullopt},
        {5, {3}, 2, 3, 31, 1, 2, 1},      {1, {2, 3}, 1, 6, 35, 2, 1, std::nullopt},
    };
    for (const Row& row : rows) {
        INFO("m = " << row.m << ", modulus " << row.modulus);
        const SAWitness w = sa_witness(SurfaceParams(row.m), row.excluded);
        CHECK(w.a == row.a);
        CHECK(w.r == row.r);
        CHECK(w.modulus == row.modulus);
        CHECK(w.targets.size() == 6);
        CHECK(w.lifts.size() == row.lifts);
        CHECK(w.checks.size() == row.reps);
        CHECK(w.family_s == row.family_s);
        CHECK_FALSE(w.prime_modulus);
        CHECK_FALSE(w.device.has_value());
        CHECK(w.verify());
    }

    SECTION("the excluded set collapses onto the level's own primes") {
        // 2 divides the level, so it contributes nothing to the scale factor.
        CHECK(sa_witness(SurfaceParams(2), {2}).r == 1);
        CHECK(sa_witness(SurfaceParams(12), {2}).r == 1);
        // Only the infinite place excluded: the scale factor is trivial.
        const SAWitness w = sa_witness(SurfaceParams(5), {});
        CHECK(w.a == 4);
        CHECK(w.r == 1);
        CHECK(w.modulus == 11);
        CHECK(w.verify());
    }

    SECTION("duplicate primes in the excluded set are merged") {
        const SAWitness w = sa_witness(SurfaceParams(5), {2, 2});
        CHECK(w.s_primes == std::vector<i64>{2});
        CHECK(w.modulus == 11);
    }
}

TEST_CASE("targets live on the surface and are symmetry-invariant", "[strongapprox]") {
    for (i64 m : {5, 8, -2}) {
        const SAWitness w = sa_witness(SurfaceParams(m), {2});
        const u64 D = static_cast<u64>(w.modulus);
        const ModSurface S(SurfaceParams(m), D);
        const auto tset = target_set(w);
        for (const auto& t : w.targets) {
            INFO("m = " << m << ", target (" << t[0] << ", " << t[1] << ", " << t[2] << ")");
            CHECK(S.f(t[0], t[1], t[2]) == 0);
            for (GammaLetter g : gamma_generators) CHECK(tset.count(gamma_apply_mod(g, t, D)) == 1);
        }
    }
}

TEST_CASE("local certificates pin the pattern residues", "[strongapprox]") {
    for (i64 m : {5, 1, -2, 12}) {
        const SAWitness w = sa_witness(SurfaceParams(m), {2});
        const SurfaceParams sp(m);
        for (const PatternLift& lift : w.lifts) {
            INFO("m = " << m << ", p = " << lift.p);
            CHECK(local_point_ok(sp, lift.point));
            const u64 pe = pow_u64_checked(lift.p, lift.e);
            CHECK(lift.point.xyz[0] % pe == mod_math_u64(w.a * w.r, pe));
            CHECK(lift.point.xyz[1] % pe == 0);
            CHECK(lift.point.xyz[2] % pe == 0);
            // The stored point is an exact square root of the level.
            const u64 pk = pow_u64_checked(lift.p, lift.point.k);
            CHECK(mulmod(lift.point.xyz[0], lift.point.xyz[0], pk) == mod_math_u64(m, pk));
            // The raw coordinate seed lifts on its own as well.
            const u64 up = static_cast<u64>(lift.p);
            const auto disk = hensel_lift_point(sp, lift.p, {mod_math_u64(w.a * w.r, up), 0, 0}, 1);
            REQUIRE(disk.has_value());
            CHECK(local_point_ok(sp, *disk));
        }
    }

    SECTION("the composite modulus at level one covers both primes") {
        const SAWitness w = sa_witness(SurfaceParams(1), {2});
        REQUIRE(w.lifts.size() == 2);
        CHECK(w.lifts[0].p * w.lifts[1].p == 15);
    }
}

TEST_CASE("orbit closures and the line sweep miss every target", "[strongapprox]") {
    SECTION("the mod-11 surface splits into the closure and the six targets") {
        const SurfaceParams sp(5);
        const SAWitness w = sa_witness(sp, {2});
        REQUIRE(w.modulus == 11);
        const auto orbit = orbit_mod_n(sp, tr(0, 1, 2), 11);
        CHECK(orbit == orbit_mod_n(sp, tr(1, 2, 2), 11));
        CHECK(orbit.size() == w.checks[0].orbit_size);

        std::set<std::array<u64, 3>> surface;
        const ModSurface S(sp, 11);
        for (u64 x = 0; x < 11; ++x)
            for (u64 y = 0; y < 11; ++y)
                for (u64 z = 0; z < 11; ++z)
                    if (S.f(x, y, z) == 0) surface.insert({x, y, z});
        CHECK(surface.size() == 166);
        CHECK(orbit.size() == 160);
        std::set<std::array<u64, 3>> both = orbit;
        for (const auto& t : w.targets) {
            CHECK(orbit.count(t) == 0);
            CHECK(surface.count(t) == 1);
            both.insert(t);
        }
        CHECK(both == surface);
    }

    SECTION("random integral points from the reduction classes avoid the targets") {
        const SurfaceParams sp(5);
        const SAWitness w = sa_witness(sp, {2});
        const auto tset = target_set(w);
        std::mt19937_64 rng(0x73617070726f7831ull);
        std::vector<Triple> seeds = {tr(0, 1, 2), tr(1, 2, 2)};
        for (i64 y = -5; y <= 5; ++y) {
            seeds.push_back(tr(2, y, y + 1));
            seeds.push_back(tr(2, y, y - 1));
        }
        int violations = 0;
        for (int trial = 0; trial < 400; ++trial) {
            Triple t = seeds[rng() % seeds.size()];
            const int len = 1 + static_cast<int>(rng() % 8);
            for (int i = 0; i < len; ++i)
                t = gamma_apply(gamma_generators[rng() % gamma_generators.size()], t);
            REQUIRE(on_surface(sp, t));
            if (tset.count(reduce_mod(t, 11))) ++violations;
        }
        CHECK(violations == 0);
    }

    SECTION("the x = 2 line at level eight misses the targets pointwise") {
        const SurfaceParams sp(8);
        const SAWitness w = sa_witness(sp, {2});
        REQUIRE(w.modulus == 17);
        REQUIRE(w.family_s == 2);
        const auto tset = target_set(w);
        const ModSurface S(sp, 17);
        for (u64 y = 0; y < 17; ++y)
            for (u64 z : {(y + 2) % 17, (y + 15) % 17}) {
                CHECK(S.f(2, y, z) == 0);
                CHECK(tset.count({2, y, z}) == 0);
            }
    }
}

TEST_CASE("the cone level runs the square-residue device", "[strongapprox]") {
    const SurfaceParams sp(0);

    SECTION("smallest device prime outside the excluded set") {
        const SAWitness w = sa_witness(sp, {2});
        REQUIRE(w.device.has_value());
        CHECK(w.device->l == 5);
        CHECK(w.device->delta == 2);
        CHECK(w.modulus == 25);
        CHECK(w.a == 0);
        CHECK(w.targets == std::vector<std::array<u64, 3>>{{10, 5, 0}, {15, 5, 0}});
        REQUIRE(w.checks.size() == 2);
        CHECK(w.checks[0].rep == tr(0, 0, 0));
        CHECK(w.checks[0].orbit_size == 1);
        CHECK(w.checks[1].rep == tr(3, 3, 3));
        CHECK(w.checks[1].orbit_size > 1);
        CHECK_FALSE(w.family_s.has_value());
        CHECK(w.verify());
    }

    SECTION("the device prime skips excluded primes") {
        const SAWitness w = sa_witness(sp, {5});
        REQUIRE(w.device.has_value());
        CHECK(w.device->l == 13);
        CHECK(w.device->delta == 5);
        CHECK(w.modulus == 169);
        CHECK(w.verify());
        CHECK(sa_witness(sp, {2, 5}).device->l == 13);
    }

    SECTION("the device certificate hits its target exactly") {
        const SAWitness w = sa_witness(sp, {2});
        REQUIRE(w.lifts.size() == 1);
        const PatternLift& lift = w.lifts[0];
        CHECK(lift.p == 5);
        CHECK(lift.e == 2);
        CHECK(local_point_ok(sp, lift.point));
        CHECK(lift.point.xyz[0] % 25 == 10);
        CHECK(lift.point.xyz[1] == 5);
        CHECK(lift.point.xyz[2] == 0);
        // x = 5u with u^2 = -1 to the stored precision's working depth.
        const u64 u = lift.point.xyz[0] / 5;
        CHECK(mulmod(u, u, 125) == 124);
    }

    SECTION("orbits of both cone classes avoid the device targets") {
        const auto cone = orbit_mod_n(sp, tr(0, 0, 0), 25);
        CHECK(cone == std::set<std::array<u64, 3>>{{0, 0, 0}});
        const auto orbit = orbit_mod_n(sp, tr(3, 3, 3), 25);
        for (const auto& t : sa_witness(sp, {2}).targets) CHECK(orbit.count(t) == 0);
    }
}

TEST_CASE("tampered transcripts fail re-verification", "[strongapprox]") {
    const SAWitness base = sa_witness(SurfaceParams(5), {2});
    REQUIRE(base.verify());

    SECTION("scale data") {
        SAWitness w = base;
        w.a = 3;
        CHECK_FALSE(w.verify());
        w = base;
        w.modulus += 2;
        CHECK_FALSE(w.verify());
        w = base;
        w.r = 1;
        CHECK_FALSE(w.verify());
        w = base;
        w.s_primes = {3};
        CHECK_FALSE(w.verify());
        w = base;
        w.prime_modulus = true;
        CHECK_FALSE(w.verify());
        w = base;
        w.device = SquareDevice{5, 2};
        CHECK_FALSE(w.verify());
    }

    SECTION("target list") {
        SAWitness w = base;
        w.targets.pop_back();
        CHECK_FALSE(w.verify());
        w = base;
        w.targets[0][1] += 1;
        CHECK_FALSE(w.verify());
    }

    SECTION("orbit transcript") {
        SAWitness w = base;
        w.checks[0].orbit_size += 1;
        CHECK_FALSE(w.verify());
        w = base;
        w.checks.clear();
        CHECK_FALSE(w.verify());
        w = base;
        w.checks[0].rep = w.checks[1].rep;
        CHECK_FALSE(w.verify());
        w = base;
        w.checks[0].disjoint = false;
        CHECK_FALSE(w.verify());
    }

    SECTION("family record") {
        SAWitness w = base;
        w.family_s.reset();
        CHECK_FALSE(w.verify());
        w = base;
        w.family_s = 3;
        CHECK_FALSE(w.verify());
        w = base;
        w.family_disjoint = false;
        CHECK_FALSE(w.verify());
    }

    SECTION("device tampering at the cone level") {
        const SAWitness dev = sa_witness(SurfaceParams(0), {2});
        SAWitness w = dev;
        w.device->delta = 3; // valid root, but not the normalized one
        CHECK_FALSE(w.verify());
        w = dev;
        w.device->l = 13;
        CHECK_FALSE(w.verify());
        w = dev;
        w.modulus = 26;
        CHECK_FALSE(w.verify());
    }

    SECTION("prime-level witnesses re-verify and reject edits") {
        const auto w = mod_l_nonsurjectivity(SurfaceParams(2));
        REQUIRE(w.has_value());
        REQUIRE(w->verify());
        SAWitness bad = *w;
        bad.a += 1;
        CHECK_FALSE(bad.verify());
        bad = *w;
        bad.s_primes = {2};
        CHECK_FALSE(bad.verify());
    }
}

TEST_CASE("prime-level certificates match the pinned pairs", "[strongapprox]") {
    SECTION("stated examples") {
        const auto w5 = mod_l_nonsurjectivity(SurfaceParams(5));
        REQUIRE(w5.has_value());
        CHECK(w5->modulus == 11);
        CHECK(w5->a == 4);
        CHECK(w5->prime_modulus);
        CHECK(w5->s_primes.empty());
        CHECK(w5->verify());
        CHECK(target_set(*w5) ==
              std::set<std::array<u64, 3>>{{0, 0, 4}, {0, 0, 7}, {0, 4, 0}, {0, 7, 0}, {4, 0, 0}, {7, 0, 0}});

        const auto w2 = mod_l_nonsurjectivity(SurfaceParams(2));
        REQUIRE(w2.has_value());
        CHECK(w2->modulus == 23);
        CHECK(w2->a == 5);
        CHECK(w2->verify());

        const auto wn = mod_l_nonsurjectivity(SurfaceParams(-11));
        REQUIRE(wn.has_value());
        CHECK(wn->modulus == 47);
        CHECK(wn->a == 6);
        CHECK(wn->verify());
    }

    SECTION("the chosen scale is the smallest qualifying one") {
        for (i64 m : {5, 2, -11, 22}) {
            const auto w = mod_l_nonsurjectivity(SurfaceParams(m));
            REQUIRE(w.has_value());
            INFO("m = " << m << ", a = " << w->a);
            CHECK(prime_scale_fits(m, w->a));
            for (i64 b = 1; b < w->a; ++b) CHECK_FALSE(prime_scale_fits(m, b));
        }
    }

    SECTION("square levels are rejected") {
        for (i64 m : {0, 1, 4, 9, 16, 121})
            CHECK_THROWS_AS(mod_l_nonsurjectivity(SurfaceParams(m)), std::domain_error);
    }

    SECTION("the search respects its ceiling") {
        CHECK_FALSE(mod_l_nonsurjectivity(SurfaceParams(5), 3).has_value());
        CHECK(mod_l_nonsurjectivity(SurfaceParams(5), 4).has_value());
    }
}

TEST_CASE("witness construction rejects unusable input", "[strongapprox]") {
    CHECK_THROWS_AS(sa_witness(SurfaceParams(5), {4}), std::domain_error);
    CHECK_THROWS_AS(sa_witness(SurfaceParams(5), {6}), std::domain_error);
    CHECK_THROWS_AS(sa_witness(SurfaceParams(5), {1}), std::domain_error);
    // The other singular level has no reduction theory to verify against.
    CHECK_THROWS_AS(sa_witness(SurfaceParams(4), {2}), std::domain_error);
}

TEST_CASE("every stated level verifies end to end", "[strongapprox]") {
    for (i64 m : {1, 2, 5, -2, -4, 8, 12, 0}) {
        INFO("m = " << m);
        const SAWitness w = sa_witness(SurfaceParams(m), {2});
        CHECK(w.verify());
        CHECK(w.json().rfind("{\"m\": ", 0) == 0);
    }

    SECTION("serialization is deterministic") {
        CHECK(sa_witness(SurfaceParams(5), {2}).json() == sa_witness(SurfaceParams(5), {2}).json());
        CHECK(sa_witness(SurfaceParams(0), {2}).json() == sa_witness(SurfaceParams(0), {2}).json());
        const auto w = mod_l_nonsurjectivity(SurfaceParams(2));
        CHECK(w->json().find("\"prime_modulus\": true") != std::string::npos);
    }
}
