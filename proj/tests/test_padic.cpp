// tests/test_padic.cpp — valuations, quadratic symbols, Hilbert symbols against the
// independent conic oracle, and the product formula.
#include "markoff/padic.hpp"

#include "support/conic_oracle.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace markoff;

TEST_CASE("valuation and unit part", "[padic]") {
    CHECK(valuation(Int(48), 2) == 4);
    CHECK(valuation(Int(48), 3) == 1);
    CHECK(valuation(Int(-50), 5) == 2);
    CHECK(unit_part(Int(-50), 5) == -2);
    CHECK_THROWS_WITH(valuation(Int(0), 3), "valuation of zero");
    CHECK_THROWS_WITH(hilbert(Int(0), Int(5), Place::finite(3)), "valuation of zero");
}

TEST_CASE("legendre symbol matches the residue table", "[padic]") {
    // squares mod 7: {1, 2, 4}
    for (i64 a : {1, 2, 4}) CHECK(legendre_i64(a, 7) == 1);
    for (i64 a : {3, 5, 6}) CHECK(legendre_i64(a, 7) == -1);
    CHECK(legendre_i64(14, 7) == 0);
    CHECK(legendre_i64(-1, 5) == 1);
    CHECK(legendre_i64(-1, 7) == -1);
}

TEST_CASE("local squares", "[padic]") {
    CHECK(is_square_qp(Int(17), Place::finite(2)));   // 1 mod 8
    CHECK(!is_square_qp(Int(5), Place::finite(2)));   // 5 mod 8
    CHECK(is_square_qp(Int(4), Place::finite(2)));
    CHECK(!is_square_qp(Int(8), Place::finite(2)));   // odd valuation
    CHECK(is_square_qp(Int(-4), Place::finite(5)));   // -1 is a square mod 5
    CHECK(!is_square_qp(Int(-4), Place::finite(7)));
    CHECK(is_square_qp(Int(50), Place::finite(7)));   // unit square times 5^2... unit part 2: (2/7)=1
    CHECK(!is_square_qp(Int(-9), Place::real()));
    CHECK(is_square_qp(Int(9), Place::real()));
}

TEST_CASE("pinned Hilbert values", "[padic]") {
    // (2, 5)_2 = 1/2 and (u, 5)_2 = 0 for odd units u.
    CHECK(hilbert(Int(2), Int(5), Place::finite(2)) == half_half);
    for (i64 u : {1, 3, 5, 7, 9, 11, 13, 15, -1, -3, -7}) {
        CHECK(hilbert(Int(u), Int(5), Place::finite(2)) == half_zero);
    }
    CHECK(hilbert(Int(-1), Int(-1), Place::real()) == half_half);
    CHECK(hilbert(Int(-1), Int(1), Place::real()) == half_zero);
    // (p, p)_p = (p, -1)_p classics.
    CHECK(hilbert(Int(3), Int(3), Place::finite(3)) == half_half);   // (-1/3) = -1
    CHECK(hilbert(Int(5), Int(5), Place::finite(5)) == half_zero);   // (-1/5) = 1
}

TEST_CASE("Hilbert symbol is symmetric and bilinear", "[padic]") {
    std::mt19937_64 rng(1618);
    std::vector<Place> places{Place::real(), Place::finite(2), Place::finite(3),
                              Place::finite(5), Place::finite(7), Place::finite(13)};
    for (int trial = 0; trial < 500; ++trial) {
        i64 a = static_cast<i64>(rng() % 4001) - 2000;
        i64 b = static_cast<i64>(rng() % 4001) - 2000;
        i64 c = static_cast<i64>(rng() % 4001) - 2000;
        if (a == 0 || b == 0 || c == 0) continue;
        for (Place v : places) {
            CHECK(hilbert(Int(a), Int(b), v) == hilbert(Int(b), Int(a), v));
            CHECK(hilbert(Int(a) * Int(b), Int(c), v) ==
                  hilbert(Int(a), Int(c), v) + hilbert(Int(b), Int(c), v));
            CHECK(hilbert(Int(a) * Int(a), Int(c), v) == half_zero);
        }
    }
}

TEST_CASE("Hilbert symbol agrees with the conic oracle", "[padic]") {
    std::vector<Place> places{Place::real(),     Place::finite(2), Place::finite(3),
                              Place::finite(5),  Place::finite(7), Place::finite(11),
                              Place::finite(13)};
    for (i64 a = -12; a <= 12; ++a) {
        if (a == 0) continue;
        for (i64 b = -12; b <= 12; ++b) {
            if (b == 0) continue;
            for (Place v : places) {
                INFO("a=" << a << " b=" << b << " v=" << v.str());
                CHECK(hilbert(Int(a), Int(b), v) == testsupport::conic_hilbert(a, b, v));
            }
        }
    }
}

TEST_CASE("product formula", "[padic]") {
    std::mt19937_64 rng(905);
    for (int trial = 0; trial < 2000; ++trial) {
        i64 a = static_cast<i64>(rng() % 200001) - 100000;
        i64 b = static_cast<i64>(rng() % 200001) - 100000;
        if (a == 0 || b == 0) continue;
        INFO("a=" << a << " b=" << b);
        CHECK(hilbert_reciprocity_check(Int(a), Int(b)) == half_zero);
    }
}

TEST_CASE("modular square roots", "[padic]") {
    for (u64 p : {3ull, 5ull, 7ull, 13ull, 17ull, 41ull, 73ull, 97ull, 1000003ull}) {
        int found = 0;
        for (u64 a = 1; a < std::min<u64>(p, 60); ++a) {
            if (powmod(a, (p - 1) / 2, p) != 1) continue;
            u64 r = sqrt_mod_p(a, p);
            CHECK(mulmod(r, r, p) == a);
            ++found;
        }
        CHECK(found > 0);
    }
    // Lifted roots mod p^k.
    for (i64 p : {3, 5, 13, 17}) {
        u64 pk = pow_u64_checked(p, 5);
        for (u64 x = 1; x < 40; ++x) {
            if (x % static_cast<u64>(p) == 0) continue;
            u64 a = mulmod(x, x, pk);
            u64 r = sqrt_mod_p_pow(a, p, 5);
            CHECK(mulmod(r, r, pk) == a);
        }
    }
    CHECK_THROWS(sqrt_mod_p(3, 5));  // 3 is not a residue mod 5
}

TEST_CASE("precision guard on modulus growth", "[padic]") {
    CHECK_THROWS_AS(pow_u64_checked(2, 80), std::overflow_error);
    CHECK(pow_u64_checked(2, 20) == (u64(1) << 20));
}
