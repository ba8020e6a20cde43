#include <catch2/catch_amalgamated.hpp>

#include "balmet/expr.hpp"
#include "balmet/maps.hpp"

using namespace balmet;

namespace {
const cplx kZ0(0.8, -0.3);
const cplx kZ1(-0.4, 1.1);
}  // namespace

TEST_CASE("atoms and precedence") {
  CHECK(parse_expression("z0").eval(kZ0, kZ1) == kZ0);
  CHECK(parse_expression("z1").eval(kZ0, kZ1) == kZ1);
  CHECK(std::abs(parse_expression("2.5").eval(kZ0, kZ1) - cplx(2.5, 0)) == 0.0);
  CHECK(std::abs(parse_expression("z0+z1*z0").eval(kZ0, kZ1) - (kZ0 + kZ1 * kZ0)) < 1e-15);
  CHECK(std::abs(parse_expression("(z0+z1)*z0").eval(kZ0, kZ1) - ((kZ0 + kZ1) * kZ0)) < 1e-15);
  CHECK(std::abs(parse_expression("z0-z1-z1").eval(kZ0, kZ1) - (kZ0 - kZ1 - kZ1)) < 1e-15);
  CHECK(std::abs(parse_expression("6/2/3").eval(kZ0, kZ1) - cplx(1, 0)) < 1e-15);
}

TEST_CASE("powers, negation, conjugation") {
  CHECK(std::abs(parse_expression("z0^3").eval(kZ0, kZ1) - kZ0 * kZ0 * kZ0) < 1e-15);
  CHECK(std::abs(parse_expression("-z0^2").eval(kZ0, kZ1) + kZ0 * kZ0) < 1e-15);
  CHECK(std::abs(parse_expression("z0^-1").eval(kZ0, kZ1) - 1.0 / kZ0) < 1e-15);
  CHECK(std::abs(parse_expression("conj(z1)").eval(kZ0, kZ1) - std::conj(kZ1)) == 0.0);
  CHECK(std::abs(parse_expression("conj(z0*z1)").eval(kZ0, kZ1) -
                 std::conj(kZ0 * kZ1)) < 1e-15);
  CHECK(std::abs(parse_expression("sqrt(3)").eval(kZ0, kZ1) - cplx(std::sqrt(3.0), 0)) <
        1e-15);
}

TEST_CASE("fixture entries evaluate to their closed forms") {
  const auto& rows = ftilde_entries();
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) REQUIRE(row.size() == 2);

  const double s3 = std::sqrt(3.0);
  const cplx expected[4][2] = {
      {kZ0 * kZ0, kZ0 * std::conj(kZ1) * 0.5 * (s3 - 1.0)},
      {-kZ0 * kZ1 * 0.5 * (s3 - 1.0),
       kZ0 * std::conj(kZ0) + 0.5 * kZ1 * std::conj(kZ1) * s3},
      {-kZ0 * kZ1 * 0.5 * (s3 + 1.0), -0.5 * kZ1 * std::conj(kZ1)},
      {kZ1 * kZ1, std::conj(kZ0) * kZ1 * 0.5 * (1.0 - s3)},
  };
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) {
      const cplx got = parse_expression(rows[i][j]).eval(kZ0, kZ1);
      CHECK(std::abs(got - expected[i][j]) < 1e-14);
    }
}

TEST_CASE("rejected inputs name the position") {
  for (const char* bad : {"z0**z1", "2z0", "z0^z1", "sqrt(z0)", "sqrt(-1)", "z2", "",
                          "(z0", "z0+", "1..2"}) {
    try {
      parse_expression(bad);
      FAIL(std::string("accepted: ") + bad);
    } catch (const parse_error& e) {
      CHECK(std::string(e.what()).find("position") != std::string::npos);
    }
  }
}

TEST_CASE("whitespace is free, implicit multiplication is not") {
  CHECK(std::abs(parse_expression("  z0 * z1  ").eval(kZ0, kZ1) - kZ0 * kZ1) < 1e-15);
  CHECK_THROWS_AS(parse_expression("z0 z1"), parse_error);
}

TEST_CASE("source text round trip") {
  const std::string text = "z0*conj(z1)*1/2*(sqrt(3)-1)";
  CHECK(parse_expression(text).source() == text);
}
