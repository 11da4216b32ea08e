#include <doctest.h>

#include <cmath>

#include "contextua/errors.hpp"
#include "contextua/rational.hpp"
#include "helpers.hpp"

using namespace contextua;
using testing::ints;

TEST_CASE("rational literals parse exactly") {
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("-6/4") == Rational(-3, 2));
  CHECK(parse_rational(" 0.25 ") == Rational(1, 4));
  CHECK(parse_rational("-1e-3") == Rational(-1, 1000));
  CHECK(parse_rational("2.5E2") == Rational(250));
  CHECK(parse_rational("010/012") == Rational(5, 6));
  CHECK(parse_rational("0.0") == Rational(0));
  CHECK(to_string(Rational(-3, 2)) == "-3/2");
  CHECK(to_string(Rational(4)) == "4");
  CHECK_THROWS_AS(parse_rational("1/0"), InvalidInput);
  CHECK_THROWS_AS(parse_rational("abc"), InvalidInput);
  CHECK_THROWS_AS(parse_rational(""), InvalidInput);
}

TEST_CASE("doubles convert exactly") {
  CHECK(exact_from_double(0.5) == Rational(1, 2));
  CHECK(to_double(exact_from_double(0.1)) == 0.1);
  CHECK_THROWS_AS(exact_from_double(std::nan("")), InvalidInput);
}

TEST_CASE("row reduction, rank and null space") {
  const auto a = RationalMatrix::from_rows({ints({1, 2, 3}), ints({2, 4, 6}), ints({1, 0, 1})});
  CHECK(rank(a) == 2);
  const auto ns = null_space(a);
  REQUIRE(ns.basis.cols() == 1);
  const auto prod = a * ns.basis.col(0);
  for (const auto& x : prod) CHECK(x == 0);
  CHECK(ns.basis(ns.free_cols[0], 0) == 1);

  const auto ech = row_reduce(a, ints({1, 2, 0}));
  CHECK(ech.consistent);
  CHECK(!row_reduce(a, ints({1, 3, 0})).consistent);
}

TEST_CASE("inverse is exact") {
  const auto a = RationalMatrix::from_rows({ints({2, 1}), ints({7, 4})});
  CHECK(a * inverse(a) == RationalMatrix::identity(2));
  CHECK_THROWS_AS(inverse(RationalMatrix::from_rows({ints({1, 2}), ints({2, 4})})), InvalidInput);
}
