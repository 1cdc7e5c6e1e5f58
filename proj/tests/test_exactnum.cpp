#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lienard/exactnum.hpp"
#include "support.hpp"

using namespace lienard;

TEST_CASE("rational canonical form")
{
    const Rational r(6, -4);
    CHECK(r.numerator() == -3);
    CHECK(r.denominator() == 2);
    CHECK(r.to_string() == "-3/2");
    CHECK(Rational(0, 7).to_string() == "0/1");
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("rational parsing")
{
    CHECK(Rational::parse("-476/225") == Rational(-476, 225));
    CHECK(Rational::parse(" 8 ") == Rational(8));
    CHECK(Rational::parse("+3/9") == Rational(1, 3));
    CHECK(Rational::parse("0.25") == Rational(1, 4));
    CHECK(Rational::parse("-1.5e-2") == Rational(-3, 200));
    CHECK(Rational::parse("1e3") == Rational(1000));
    CHECK_THROWS_AS(Rational::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse("1/2/3"), std::invalid_argument);
}

TEST_CASE("doubles convert through their binary expansion")
{
    CHECK(Rational::from_double(0.5) == Rational(1, 2));
    // 0.1 is not 1/10 in binary.
    const Rational tenth = Rational::from_double(0.1);
    CHECK(tenth != Rational(1, 10));
    CHECK(tenth.denominator() == mpz_class("36028797018963968"));
    CHECK(tenth.to_double() == 0.1);
    CHECK_THROWS_AS(Rational::from_double(std::nan("")), std::invalid_argument);
}

TEST_CASE("pi_ext_add")
{
    CHECK(pi_ext_add(PiExt{Rational(1, 2)}, PiExt::over_pi(Rational(2, 3))) == PiExt{Rational(1, 2), Rational(2, 3)});
    const PiExt x{Rational(5, 7), Rational(-3, 11)};
    CHECK(pi_ext_add(x, -x).is_zero());
    CHECK(pi_ext_add(PiExt::over_pi(Rational(-476, 225)), PiExt::over_pi(Rational(476, 225))) == PiExt{});
}

TEST_CASE("pi_ext_scale")
{
    CHECK(pi_ext_scale(PiExt{Rational(1), Rational(1)}, Rational(2)) == PiExt{Rational(2), Rational(2)});
    CHECK(pi_ext_scale(PiExt::over_pi(Rational(-4, 3)), Rational(3, 2)) == PiExt::over_pi(Rational(-2)));
    CHECK(pi_ext_scale(PiExt::over_pi(Rational(2)), Rational(1, 3)) == PiExt::over_pi(Rational(2, 3)));
}

TEST_CASE("products that would need 1/pi^2 are rejected")
{
    const PiExt a{Rational(1), Rational(2)};
    const PiExt b{Rational(3), Rational(4)};
    CHECK_THROWS_AS(multiply(a, b), FieldError);
    CHECK(multiply(a, PiExt{Rational(3)}) == PiExt{Rational(3), Rational(6)});
    CHECK(multiply(PiExt{Rational(-1)}, b) == -b);
}

TEST_CASE("pi_ext_to_real")
{
    CHECK(pi_ext_to_real(PiExt::over_pi(Rational(1))) == doctest::Approx(0.3183098861837907).epsilon(1e-15));
    CHECK(pi_ext_to_real(PiExt{Rational(1)}) == 1.0);
    CHECK(pi_ext_to_real(PiExt{Rational(4, 15)}) == doctest::Approx(0.2666666666666667).epsilon(1e-15));
    CHECK_THROWS_AS(pi_ext_to_real(PiExt{Rational(1)}, 10), std::invalid_argument);
}

TEST_CASE("pi_ext_sign")
{
    CHECK(pi_ext_sign(PiExt{}) == 0);
    CHECK(pi_ext_sign(PiExt::over_pi(Rational(-476, 225))) == -1);
    // 1 - 3/pi = 0.04507...
    CHECK(pi_ext_sign(PiExt{Rational(1), Rational(-3)}) == 1);
    CHECK(pi_ext_sign(PiExt{Rational(-1), Rational(3)}) == -1);
}

TEST_CASE("pi_ext_sign separates values extremely close to zero")
{
    // 355/113 > pi, so 113/355 - 1/pi < 0 (about -2.7e-8).
    CHECK(pi_ext_sign(PiExt{Rational(113, 355), Rational(-1)}) == -1);
    // Convergent 428224593349304/136308121570117 (|error| ~ 1e-29).
    const Rational near_pi{mpq_class("428224593349304/136308121570117")};
    const int expected = near_pi > pi_bounds(60).first ? -1 : 1;
    CHECK(pi_ext_sign(PiExt{Rational(1), -near_pi}) == expected);
}

TEST_CASE("stored pi digits agree with the Machin expansion")
{
    const auto [lo, hi] = pi_bounds(300);
    const auto [mlo, mhi] = pi_bounds(400);
    CHECK(lo <= mhi);
    CHECK(mlo <= hi);
    CHECK(hi - lo == Rational{mpq_class(mpz_class(1), mpz_class("1" + std::string(300, '0')))});
}

TEST_CASE("property: sign is zero iff both parts are zero and matches the numeric value")
{
    std::mt19937_64 rng(20261016);
    for (int trial = 0; trial < 500; ++trial) {
        const PiExt x{testing::random_rational(rng, 5, 50), testing::random_rational(rng, 5, 50)};
        const int s = pi_ext_sign(x);
        CHECK((s == 0) == x.is_zero());
        if (!x.is_zero()) {
            const double v = pi_ext_to_real(x);
            CHECK(((v > 0) ? 1 : (v < 0 ? -1 : 0)) == s);
        }
    }
}

TEST_CASE("property: canonical form is idempotent")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Rational r = testing::random_rational(rng, 100, 1000);
        const Rational again{r.raw()};
        CHECK(again == r);
        CHECK(again.to_string() == r.to_string());
        CHECK(Rational::parse(r.to_string()) == r);
    }
}

TEST_CASE("to_double rounds to nearest")
{
    CHECK(Rational(1, 100).to_double() == 0.01);
    CHECK(Rational(2, 3).to_double() == 2.0 / 3.0);
    CHECK(Rational(-1, 10).to_double() == -0.1);
    // IEEE division of exactly representable integers is correctly rounded.
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> num(-1000000, 1000000);
    std::uniform_int_distribution<long> den(1, 1000000);
    for (int trial = 0; trial < 2000; ++trial) {
        const long p = num(rng);
        const long q = den(rng);
        CHECK(Rational(p, q).to_double() == static_cast<double>(p) / static_cast<double>(q));
    }
}
