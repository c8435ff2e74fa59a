#include "doctest.h"

#include <random>

#include "prociter/rational.hpp"

using namespace prociter;

TEST_SUITE("bigint") {

TEST_CASE("small values round-trip") {
    CHECK(BigUint(0).to_string() == "0");
    CHECK(BigUint(1).to_string() == "1");
    CHECK(BigUint(4294967296ull).to_string() == "4294967296");
    CHECK(BigUint::from_decimal("18446744073709551616").to_string() ==
          "18446744073709551616");  // 2^64
}

TEST_CASE("arithmetic agrees with native 64-bit on random inputs") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        uint64_t a = rng() >> (1 + rng() % 40);  // < 2^63, so a+b never wraps
        uint64_t b = rng() >> (1 + rng() % 40);
        CHECK(BigUint(a) + BigUint(b) == BigUint(a + b));
        if (a >= b) CHECK(BigUint(a) - BigUint(b) == BigUint(a - b));
        unsigned __int128 prod = (unsigned __int128)a * b;
        BigUint big_prod = BigUint(a) * BigUint(b);
        BigUint expect = BigUint(uint64_t(prod >> 64)) * BigUint::pow2(64) +
                         BigUint(uint64_t(prod));
        CHECK(big_prod == expect);
        if (b != 0) {
            BigUint q, r;
            BigUint::divmod(BigUint(a), BigUint(b), q, r);
            CHECK(q == BigUint(a / b));
            CHECK(r == BigUint(a % b));
        }
    }
}

TEST_CASE("multi-limb division reconstructs") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        BigUint a(rng());
        for (int j = 0; j < int(rng() % 4); ++j) a = a * BigUint(rng() | 1) + BigUint(rng() % 97);
        BigUint b(rng() | 1);
        for (int j = 0; j < int(rng() % 3); ++j) b = b * BigUint(rng() | 1);
        BigUint q, r;
        BigUint::divmod(a, b, q, r);
        CHECK(q * b + r == a);
        CHECK(BigUint::cmp(r, b) < 0);
    }
}

TEST_CASE("gcd") {
    CHECK(BigUint::gcd(BigUint(12), BigUint(18)) == BigUint(6));
    CHECK(BigUint::gcd(BigUint(0), BigUint(5)) == BigUint(5));
    BigUint big = BigUint::pow2(100) * BigUint(3);
    CHECK(BigUint::gcd(big, BigUint::pow2(101)) == BigUint::pow2(100));
}

}  // TEST_SUITE

TEST_SUITE("rational") {

TEST_CASE("normalization and printing") {
    CHECK(Rational(3, 6).to_string() == "1/2");
    CHECK(Rational(4, 2).to_string() == "2");
    CHECK(Rational(0, 7).to_string() == "0");
    CHECK(Rational(-1, 2).to_string() == "-1/2");
    CHECK(Rational(1, -2).to_string() == "-1/2");
    CHECK(Rational::parse("3/4").to_string() == "3/4");
    CHECK(Rational::parse("7").to_string() == "7");
}

TEST_CASE("field ops") {
    Rational half(1, 2), third(1, 3);
    CHECK((half + third).to_string() == "5/6");
    CHECK((half - third).to_string() == "1/6");
    CHECK((third - half).to_string() == "-1/6");
    CHECK((half * third).to_string() == "1/6");
    CHECK(half + Rational(-1, 2) == Rational(0));
    CHECK(Rational(1, 2) < Rational(2, 3));
    CHECK(Rational(-1, 2) < Rational(1, 3));
}

TEST_CASE("exact dyadics stay exact far beyond 64 bits") {
    Rational d = Rational::pow2_inverse(200);
    Rational sum(0);
    for (int i = 0; i < 1 << 8; ++i) sum = sum + d;
    CHECK(sum == Rational::pow2_inverse(192));
}

TEST_CASE("random field laws") {
    std::mt19937_64 rng(3);
    auto gen = [&]() {
        return Rational(int64_t(rng() % 2001) - 1000, int64_t(rng() % 97) + 1);
    };
    for (int i = 0; i < 500; ++i) {
        Rational a = gen(), b = gen(), c = gen();
        CHECK(a + b == b + a);
        CHECK((a + b) + c == a + (b + c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a - a == Rational(0));
    }
}

}  // TEST_SUITE
