#include "shearlab/rational.hpp"

#include <doctest.h>

#include <cstdint>
#include <random>
#include <stdexcept>

using namespace shearlab;

TEST_CASE("rationals stay reduced with a positive denominator") {
  const Rational r(6, -8);
  CHECK(r.num() == -3);
  CHECK(r.den() == 4);
  CHECK(r.str() == "-3/4");
  CHECK(Rational(4, 2).str() == "2");
  CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("field arithmetic and ordering") {
  const Rational a(1, 3), b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == b);
  CHECK(a * b == Rational(1, 18));
  CHECK(a / b == Rational(2));
  CHECK(b < a);
  CHECK(Rational(-1, 2) < Rational(-1, 3));
  CHECK(Rational::pow2_inv(10) == Rational(1, 1024));
}

TEST_CASE("random identities hold exactly") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> d(-1000, 1000), q(1, 1000);
  for (int i = 0; i < 200; ++i) {
    const Rational x(d(rng), q(rng)), y(d(rng), q(rng)), z(d(rng), q(rng));
    CHECK((x + y) + z == x + (y + z));
    CHECK(x * (y + z) == x * y + x * z);
    CHECK((x - y) + y == x);
    if (y != Rational(0)) CHECK((x / y) * y == x);
    CHECK((x < y) == (x.to_double() < y.to_double() && x != y));
  }
}

TEST_CASE("overflow is reported, not wrapped") {
  const Rational big(INT64_MAX / 2 + 1);
  CHECK_THROWS_AS(big + big + big, std::overflow_error);
}

TEST_CASE("continued-fraction recovery") {
  CHECK(Rational::from_double(0.15).value() == Rational(3, 20));
  CHECK(Rational::from_double(-0.6).value() == Rational(-3, 5));
  CHECK_FALSE(Rational::from_double(M_PI).has_value());
}

TEST_CASE("exponents stay exact until a real operand enters") {
  const Exponent a = Exponent::from_double(0.6);
  REQUIRE(a.is_exact());
  const Exponent b = a - Exponent(Rational(1, 2));
  CHECK(b.is_exact());
  CHECK(*b.exact() == Rational(1, 10));
  const Exponent c = b + Exponent::real(M_SQRT2);
  CHECK_FALSE(c.is_exact());
  CHECK(c.value() == doctest::Approx(0.1 + M_SQRT2));
  CHECK(Exponent(Rational(1, 4)) == Exponent::from_double(0.25));
}
