#include <doctest.h>

#include "amrenorm/rational.hpp"

using namespace amrenorm;

TEST_CASE("rational parsing and printing") {
  CHECK(parse_rat("3/2") == Rat(3, 2));
  CHECK(parse_rat("-3/2") == Rat(-3, 2));
  CHECK(parse_rat("7") == Rat(7));
  CHECK(parse_rat(" 4/6 ") == Rat(2, 3));
  CHECK(parse_rat("3/-2") == Rat(-3, 2));
  CHECK(rat_str(Rat(3, 2)) == "3/2");
  CHECK(rat_str(Rat(-1, 3)) == "-1/3");
  CHECK(rat_str(Rat(5)) == "5");
  CHECK(rat_str(parse_rat("4/6")) == "2/3");
  CHECK_THROWS_AS(parse_rat(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_rat("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rat("a/b"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rat("1.5"), std::invalid_argument);
}

TEST_CASE("integer powers") {
  const Rat C(3, 2);
  CHECK(pow_rat(C, 0) == 1);
  CHECK(pow_rat(C, 3) == Rat(27, 8));
  CHECK(pow_rat(C, -1) == Rat(2, 3));
  CHECK(pow_rat(C, -3) == Rat(8, 27));
  CHECK(pow_rat(Rat(-2), 3) == -8);
  CHECK_THROWS_AS(pow_rat(Rat(0), -1), std::domain_error);
}
