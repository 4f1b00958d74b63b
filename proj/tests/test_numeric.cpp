// tests/test_numeric.cpp — exact integer helper checks.
#include "markoff/numeric.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace markoff;

TEST_CASE("mathematical mod is nonnegative", "[numeric]") {
    CHECK(mod_math(7, 4) == 3);
    CHECK(mod_math(-7, 4) == 1);
    CHECK(mod_math(-8, 4) == 0);
    CHECK(mod_math(-3, 9) == 6);
    CHECK(mod_math(-863, 4) == 1);
    CHECK(mod_math(-863, 9) == 1);
}

TEST_CASE("isqrt and perfect squares are exact near boundaries", "[numeric]") {
    for (i64 n : {0LL, 1LL, 2LL, 3LL, 4LL, 99LL, 100LL, 101LL, 999999LL, 1000000LL}) {
        i64 r = isqrt_i64(n);
        CHECK(r * r <= n);
        CHECK((r + 1) * (r + 1) > n);
    }
    CHECK(perfect_square_i64(49).value() == 7);
    CHECK(!perfect_square_i64(50));
    CHECK(!perfect_square_i64(-4));
    CHECK(perfect_square_int(Int("1000000000000000000000000")).value() == Int("1000000000000"));
    u64 big = (u64(1) << 62) - 57;
    u64 r = isqrt_u64(big);
    CHECK((u128)r * r <= big);
    CHECK((u128)(r + 1) * (r + 1) > big);
}

TEST_CASE("Miller-Rabin agrees with trial division below 20000", "[numeric]") {
    auto trial = [](u64 n) {
        if (n < 2) return false;
        for (u64 d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    };
    for (u64 n = 0; n < 20000; ++n) CHECK(is_prime_u64(n) == trial(n));
    CHECK(is_prime_u64(18446744073709551557ull));  // largest 64-bit prime
    CHECK(!is_prime_u64(18446744073709551555ull));
}

TEST_CASE("factorization round-trips", "[numeric]") {
    std::mt19937_64 rng(20260816);
    for (int trial = 0; trial < 200; ++trial) {
        u64 n = rng() % 1000000000000ull + 2;
        u64 back = 1;
        u64 prev = 0;
        for (auto [p, e] : factorize_u64(n)) {
            CHECK(is_prime_u64(p));
            CHECK(p > prev);
            prev = p;
            for (int i = 0; i < e; ++i) back *= p;
        }
        CHECK(back == n);
    }
    CHECK(factorize_abs_i64(-12) == std::vector<std::pair<u64, int>>{{2, 2}, {3, 1}});
    CHECK_THROWS(factorize_abs_i64(0));
}

TEST_CASE("rational square detection", "[numeric]") {
    CHECK(is_rational_square(Rat(4, 9)));
    CHECK(!is_rational_square(Rat(4, 8)));  // reduces to 1/2
    CHECK(!is_rational_square(Rat(-4, 9)));
    CHECK(rational_sqrt(Rat(50, 2)).value() == Rat(5));
    CHECK(rational_sqrt(Rat(49, 64)).value() == Rat(7, 8));
}
