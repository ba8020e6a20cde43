#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <numeric>

#include "balmet/quadrature.hpp"

using namespace balmet;

namespace {

// Ground truth for the normalized moments, computed in exact integer
// arithmetic: the (a, b) moment equals a! b! / (a+b+1)!.
double beta_moment(int a, int b) {
  long long num = 1, den = 1;
  for (int i = 2; i <= a; ++i) num *= i;
  for (int i = 2; i <= b; ++i) num *= i;
  for (int i = 2; i <= a + b + 1; ++i) den *= i;
  const long long g = std::gcd(num, den);
  return static_cast<double>(num / g) / static_cast<double>(den / g);
}

double moment_integrand(const ChartPoint& x, int a, int b) {
  const double u0 = std::norm(x.z0), u1 = std::norm(x.z1);
  return std::pow(u0, a) * std::pow(u1, b) / std::pow(u0 + u1, a + b);
}

}  // namespace

TEST_CASE("weights form a probability measure") {
  for (auto [np, na] : {std::pair{16, 16}, std::pair{40, 24}, std::pair{2, 4}}) {
    const QuadratureScheme q = build_quadrature(np, na);
    REQUIRE(q.nodes.size() == static_cast<size_t>(np) * na);
    double sum = 0.0;
    for (double w : q.weights) sum += w;
    CHECK(std::abs(sum - 1.0) < 1e-13);
    for (const auto& x : q.nodes) CHECK(std::abs(x.norm2() - 1.0) < 1e-12);
  }
}

TEST_CASE("stock scheme reproduces the exact moments up to degree 8") {
  const QuadratureScheme q = build_quadrature(16, 16);
  double worst = 0.0;
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; a + b <= 8; ++b) {
      const double got =
          integrate([&](const ChartPoint& x) { return moment_integrand(x, a, b); }, q);
      worst = std::max(worst, std::abs(got - beta_moment(a, b)));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("quoted moment values") {
  const QuadratureScheme q = build_quadrature(16, 16);
  const double half =
      integrate([](const ChartPoint& x) { return moment_integrand(x, 1, 0); }, q);
  CHECK(std::abs(half - 0.5) < 1e-12);
  const double third =
      integrate([](const ChartPoint& x) { return moment_integrand(x, 2, 0); }, q);
  CHECK(std::abs(third - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("exactness degrades exactly at the polar budget") {
  // a+b = n_polar is the first degree the rule can miss.
  const QuadratureScheme q = build_quadrature(4, 8);
  double inside = 0.0;
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 3; ++b) {
      const double got =
          integrate([&](const ChartPoint& x) { return moment_integrand(x, a, b); }, q);
      inside = std::max(inside, std::abs(got - beta_moment(a, b)));
    }
  CHECK(inside < 1e-14);
  const double outside =
      integrate([](const ChartPoint& x) { return moment_integrand(x, 8, 0); }, q);
  CHECK(std::abs(outside - beta_moment(8, 0)) > 1e-9);
}

TEST_CASE("pure phases integrate to zero below the azimuthal budget") {
  const QuadratureScheme q = build_quadrature(16, 16);
  for (int k = 1; k < 16; ++k) {
    const cplx got = integrate(
        [&](const ChartPoint& x) {
          const cplx zbar0 = std::conj(x.z0);
          // phase of z1 relative to z0, free of the polar variable
          cplx u = x.z1 * zbar0;
          const double m = std::abs(u);
          u = m > 0 ? u / m : cplx(0, 0);
          cplx acc(1, 0);
          for (int i = 0; i < k; ++i) acc *= u;
          return acc;
        },
        q);
    CHECK(std::abs(got) < 1e-13);
  }
}

TEST_CASE("matrix integrands reduce componentwise") {
  const QuadratureScheme q = build_quadrature(8, 8);
  const MatrixXcd m = integrate(
      [](const ChartPoint& x) {
        MatrixXcd out(2, 2);
        const double u0 = std::norm(x.z0), u1 = std::norm(x.z1);
        out << u0 / (u0 + u1), 0.0, 0.0, u1 / (u0 + u1);
        return out;
      },
      q);
  CHECK(std::abs(m(0, 0) - cplx(0.5, 0)) < 1e-13);
  CHECK(std::abs(m(1, 1) - cplx(0.5, 0)) < 1e-13);
}

TEST_CASE("size preconditions") {
  CHECK_THROWS_AS(build_quadrature(1, 16), precondition_error);
  CHECK_THROWS_AS(build_quadrature(16, 3), precondition_error);
}

TEST_CASE("non-finite samples abort with the node named") {
  const QuadratureScheme q = build_quadrature(4, 4);
  int calls = 0;
  try {
    integrate(
        [&](const ChartPoint&) {
          ++calls;
          return calls == 3 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
        },
        q);
    FAIL("expected integration_error");
  } catch (const integration_error& e) {
    CHECK(std::string(e.what()).find("node 2") != std::string::npos);
  }
}

TEST_CASE("form scale never reaches the weights") {
  // The normalized measure is scale free; the form object still reports
  // scale-dependent data.
  CHECK(FubiniStudyForm{0.5}.volume() == 0.5 * FubiniStudyForm{1.0}.volume());
  const cplx z(0.3, -0.2);
  const FubiniStudyForm f1{1.0}, f2{2.0};
  CHECK(std::abs(f2.density(z) - 2.0 * f1.density(z)) < 1e-15);
  CHECK_THROWS_AS(FubiniStudyForm{0.0}, precondition_error);
}
