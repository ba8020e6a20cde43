#include <catch2/catch_amalgamated.hpp>

#include "balmet/balance.hpp"
#include "balmet/maps.hpp"
#include "balmet/sampling.hpp"

using namespace balmet;

namespace {

// Composite Simpson on [0, 1], n intervals (even).  Used as an oracle for
// the averaged-projector entries of the quadratic monomial basis: in the
// variable t = |z0|^2 / |x|^2, uniform on [0, 1] under the normalized
// round measure, the diagonal entries are integrals of
//   t^2 / q(t),  t (1 - t) / q(t),  (1 - t)^2 / q(t),   q(t) = t^2 - t + 1.
double simpson01(const std::function<double(double)>& f, int n) {
  double acc = f(0.0) + f(1.0);
  const double h = 1.0 / n;
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0;
}

const double kPi = 3.14159265358979323846;
const double kG00 = 1.0 - kPi / (3.0 * std::sqrt(3.0));
const double kG11 = 2.0 * kPi / (3.0 * std::sqrt(3.0)) - 1.0;

}  // namespace

TEST_CASE("quadratic monomial projector averages match the rational-integral oracle") {
  auto q = [](double t) { return t * t - t + 1.0; };
  const double s00 = simpson01([&](double t) { return t * t / q(t); }, 2000);
  const double s11 = simpson01([&](double t) { return t * (1.0 - t) / q(t); }, 2000);
  const double s22 = simpson01([&](double t) { return (1.0 - t) * (1.0 - t) / q(t); }, 2000);

  CHECK(std::abs(s00 - kG00) < 1e-12);
  CHECK(std::abs(s11 - kG11) < 1e-12);
  CHECK(std::abs(s22 - kG00) < 1e-12);
  CHECK(std::abs(s00 + s11 + s22 - 1.0) < 1e-12);

  const GramMatrix g = gram(monomial_basis(BundleSpec({2})), build_quadrature(48, 16));
  REQUIRE(g.rank_r == 1);
  REQUIRE(g.dim_n == 3);
  CHECK(std::abs(g.entries(0, 0) - cplx(kG00)) < 1e-12);
  CHECK(std::abs(g.entries(1, 1) - cplx(kG11)) < 1e-12);
  CHECK(std::abs(g.entries(2, 2) - cplx(kG00)) < 1e-12);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(std::abs(g.entries(i, j)) < 1e-13);
  CHECK(std::abs(g.entries.trace() - cplx(1.0)) < 1e-13);
  CHECK_FALSE(is_balanced(g));
}

TEST_CASE("diagonal embedding is balanced on the nose") {
  const GramMatrix g = gram(eq8_basis(), build_quadrature(16, 16));
  CHECK(g.target_ratio() == 0.5);
  CHECK((g.entries - 0.5 * MatrixXcd::Identity(4, 4)).norm() < 1e-13);
  CHECK(g.residual() < 1e-13);
  CHECK(is_balanced(g, 1e-12));
}

TEST_CASE("projector averages have trace r for every basis") {
  const QuadratureScheme scheme = build_quadrature(16, 16);
  int seed = 100;
  for (const auto& degrees :
       {std::vector<int>{1, 1}, {2}, {1, 3}, {0, 1}, {2, 2}}) {
    const Basis b = random_basis(BundleSpec(degrees), seed++);
    const GramMatrix g = gram(b, scheme);
    CHECK(std::abs(g.entries.trace() - cplx(b.rank())) < 1e-12);
    CHECK((g.entries - g.entries.adjoint()).norm() < 1e-14);
  }
}

TEST_CASE("moment map splits into reproducing defect and traceless part") {
  const QuadratureScheme scheme = build_quadrature(16, 16);
  const auto sample = fibonacci_points(15);

  const MomentMapData balanced = moment_map(eq8_basis(), scheme, sample);
  CHECK(balanced.reproducing_defect < 1e-12);
  CHECK(balanced.traceless_part.norm() < 1e-13);

  const MomentMapData skew = moment_map(monomial_basis(BundleSpec({2})),
                                        build_quadrature(48, 16), sample);
  CHECK(skew.reproducing_defect < 1e-10);
  const double d0 = kG00 - 1.0 / 3.0;
  const double d1 = kG11 - 1.0 / 3.0;
  const double expect = std::sqrt(2.0 * d0 * d0 + d1 * d1);
  CHECK(std::abs(skew.traceless_part.norm() - expect) < 1e-10);
  CHECK(skew.traceless_part.norm() > 0.15);
}

TEST_CASE("one whitening step hits the known coefficient ratio") {
  const Basis stepped = t_step(monomial_basis(BundleSpec({2})), build_quadrature(48, 16));
  const double outer = std::abs(stepped.coeffs()(0, 0));
  const double mid = std::abs(stepped.coeffs()(1, 1));
  const double ratio = mid / outer;
  CHECK(std::abs(ratio - std::sqrt(kG00 / kG11)) < 1e-10);
  // The fixed point has ratio sqrt(2); one step does not reach it.
  CHECK(std::abs(ratio - std::sqrt(2.0)) > 0.03);

  // A balanced basis only picks up the global scalar sqrt(N/r).
  const Basis fixed = t_step(eq8_basis(), build_quadrature(16, 16));
  CHECK((fixed.coeffs() - std::sqrt(2.0) * eq8_basis().coeffs()).norm() < 1e-12);
}

TEST_CASE("iteration balances the quadratic monomials") {
  const QuadratureScheme scheme = build_quadrature(48, 8);
  const BalanceReport rep = balance_iterate(monomial_basis(BundleSpec({2})), scheme, 1e-10, 200);
  CHECK(rep.converged);
  CHECK(rep.iterations > 2);  // one step is provably not enough
  CHECK(rep.iterations <= 150);
  REQUIRE(!rep.residual_history.empty());
  CHECK(rep.residual_history.front() > 0.05);
  CHECK(rep.residual_history.back() <= 1e-10);
  CHECK(is_balanced(gram(rep.final_basis, scheme), 1e-9));

  // After gauge normalization the frame Gram is (1 + |z|^2)^2 and the
  // metric its reciprocal.
  for (cplx z : {cplx(0.0, 0.0), cplx(0.5, -0.2), cplx(-1.2, 0.4)}) {
    const double w = 1.0 + std::norm(z);
    const MatrixXcd h = pullback_metric(rep.final_basis, z);
    CHECK(std::abs(h(0, 0) - cplx(1.0 / (w * w))) < 1e-8);
  }
}

TEST_CASE("balanced limit of two line-bundle summands is the round metric") {
  const QuadratureScheme scheme = build_quadrature(16, 16);
  std::vector<Basis> finals;
  for (std::uint64_t seed : {1, 4, 9}) {
    const BalanceReport rep =
        balance_iterate(random_basis(BundleSpec({1, 1}), seed), scheme, 1e-10, 500);
    REQUIRE(rep.converged);
    finals.push_back(rep.final_basis);
  }
  const std::vector<cplx> probes = {cplx(0.0, 0.0), cplx(0.3, 0.4), cplx(-0.9, 0.1)};
  for (cplx z : probes) {
    const MatrixXcd target = MatrixXcd::Identity(2, 2) / (1.0 + std::norm(z));
    for (size_t i = 0; i < finals.size(); ++i) {
      const MatrixXcd h = pullback_metric(finals[i], z);
      CHECK((h - target).norm() < 1e-8);
      for (size_t j = i + 1; j < finals.size(); ++j)
        CHECK((h - pullback_metric(finals[j], z)).norm() < 1e-8);
    }
  }
}

TEST_CASE("starving summand mix is reported unconverged without throwing") {
  const QuadratureScheme scheme = build_quadrature(16, 16);
  const Basis start = random_basis(BundleSpec({1, 3}), 0);
  REQUIRE_NOTHROW(balance_iterate(start, scheme, 1e-10, 80));
  const BalanceReport rep = balance_iterate(start, scheme, 1e-10, 80);
  CHECK_FALSE(rep.converged);
  REQUIRE(rep.residual_history.size() > 3);
  CHECK(rep.residual_history.back() > 0.05);
}

TEST_CASE("gauge normalization whitens the averaged frame gram and fixes nothing else") {
  const QuadratureScheme scheme = build_quadrature(16, 16);
  const Basis b = random_basis(BundleSpec({1, 1}), 7);
  const Basis n = gauge_normalize(b, scheme);

  const MatrixXcd t = integrate(
      [&](const ChartPoint& x) {
        return MatrixXcd(section_matrix(n, x).adjoint() * section_matrix(n, x));
      },
      scheme);
  CHECK((t - MatrixXcd::Identity(2, 2)).norm() < 1e-10);

  for (cplx z : {cplx(0.1, 0.2), cplx(-0.6, 0.9)}) {
    const ChartPoint x = ChartPoint::from_affine(z);
    const MatrixXcd pa = projector(GrassMap::from_basis(b), x);
    const MatrixXcd pb = projector(GrassMap::from_basis(n), x);
    CHECK((pa - pb).norm() < 1e-12);
  }
}

TEST_CASE("iteration validates its knobs") {
  const Basis b = eq8_basis();
  const QuadratureScheme scheme = build_quadrature(8, 8);
  CHECK_THROWS_AS(balance_iterate(b, scheme, 0.0, 10), precondition_error);
  CHECK_THROWS_AS(balance_iterate(b, scheme, -1e-8, 10), precondition_error);
  CHECK_THROWS_AS(balance_iterate(b, scheme, 1e-10, 0), precondition_error);
}

TEST_CASE("right gauges spread over monomial blocks and reject cross-degree coupling") {
  const BundleSpec spec({1, 1});
  MatrixXcd a(2, 2);
  a << cplx(1.0, 0.5), cplx(0.0, -2.0), cplx(3.0, 0.0), cplx(0.0, 1.0);
  const MatrixXcd ma = right_gauge_matrix(spec, a);
  REQUIRE(ma.rows() == 4);
  CHECK(ma(0, 0) == a(0, 0));
  CHECK(ma(1, 1) == a(0, 0));
  CHECK(ma(0, 2) == a(0, 1));
  CHECK(ma(2, 0) == a(1, 0));
  CHECK(ma(2, 2) == a(1, 1));
  CHECK(ma(0, 1) == cplx(0.0));

  MatrixXcd bad = MatrixXcd::Identity(2, 2);
  bad(0, 1) = 0.25;
  CHECK_THROWS_WITH(right_gauge_matrix(BundleSpec({1, 3}), bad),
                    Catch::Matchers::ContainsSubstring("couples different degrees"));
}

TEST_CASE("direct sums require equal section ratios") {
  const Basis a = random_basis(BundleSpec({1}), 31);
  const Basis b = random_basis(BundleSpec({1}), 32);
  const Basis joined = direct_sum(a, b);
  CHECK(joined.spec().degrees == std::vector<int>{1, 1});
  CHECK(joined.sections() == 4);
  CHECK((joined.coeffs().topLeftCorner(2, 2) - a.coeffs()).norm() == 0.0);
  CHECK((joined.coeffs().bottomRightCorner(2, 2) - b.coeffs()).norm() == 0.0);
  CHECK(joined.coeffs().topRightCorner(2, 2).norm() == 0.0);

  const Basis c = random_basis(BundleSpec({3}), 33);
  try {
    direct_sum(a, c);
    FAIL("expected a precondition failure");
  } catch (const precondition_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("1/2") != std::string::npos);
    CHECK(msg.find("1/4") != std::string::npos);
  }
}
