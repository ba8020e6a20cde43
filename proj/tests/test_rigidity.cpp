#include <catch2/catch_amalgamated.hpp>

#include "balmet/balance.hpp"
#include "balmet/maps.hpp"
#include "balmet/rigidity.hpp"
#include "balmet/sampling.hpp"

using namespace balmet;

TEST_CASE("two-point overlaps are blind to ambient rotations") {
  const GrassMap base = eq8_map();
  const GrassMap rotated = rotated_map(base, random_unitary(4, 5));
  const auto points = fibonacci_points(25);
  const OverlapReport rep = overlap_invariant(base, rotated, points);
  CHECK(rep.max_gap < 1e-12);
}

TEST_CASE("two-point overlaps separate the companion map from the diagonal one") {
  const auto points = fibonacci_points(25);
  const OverlapReport rep = overlap_invariant(eq8_map(), ftilde_map(), points);
  CHECK(rep.max_gap > 1e-3);
  // The witness pair must actually realize the reported gap.
  const MatrixXcd pax = projector(eq8_map(), rep.witness_x);
  const MatrixXcd pay = projector(eq8_map(), rep.witness_y);
  const MatrixXcd pbx = projector(ftilde_map(), rep.witness_x);
  const MatrixXcd pby = projector(ftilde_map(), rep.witness_y);
  const double gap = std::abs((pax * pay).trace().real() - (pbx * pby).trace().real());
  CHECK(std::abs(gap - rep.max_gap) < 1e-12);
}

TEST_CASE("overlap invariant needs at least two points") {
  CHECK_THROWS_AS(overlap_invariant(eq8_map(), eq8_map(), fibonacci_points(1)),
                  precondition_error);
}

TEST_CASE("alignment recovers a planted rotation") {
  const GrassMap base = eq8_map();
  const MatrixXcd u = random_unitary(4, 77);
  const GrassMap moved = rotated_map(base, u);
  const auto points = fibonacci_points(30);
  const AlignmentResult res = find_unitary(base, moved, points);
  // The ascent stalls once objective gains drop below the double-precision
  // floor of the summed traces, which caps the certificate near 1e-8.
  CHECK(res.residual < 1e-6);

  // The recovered unitary conjugates every sampled projector.
  for (const ChartPoint& x : fibonacci_points(12)) {
    const MatrixXcd lhs = res.unitary * projector(base, x) * res.unitary.adjoint();
    CHECK((lhs - projector(moved, x)).norm() < 1e-6);
  }
}

TEST_CASE("verdict for a rotated copy is equivalence with a certified unitary") {
  const GrassMap base = eq8_map();
  const GrassMap moved = rotated_map(base, random_unitary(4, 7));
  const EquivalenceVerdict v = decide_equivalence(base, moved);
  REQUIRE(v.kind == Equivalence::Equivalent);
  CHECK(v.overlap_gap <= v.gap_threshold);
  CHECK(v.validation_residual < 1e-7);

  // Soundness: re-check the certificate on points the decision never saw.
  double worst = 0.0;
  for (const ChartPoint& x : halton_points(40, 999)) {
    const MatrixXcd lhs = v.unitary * projector(base, x) * v.unitary.adjoint();
    worst = std::max(worst, (lhs - projector(moved, x)).norm());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("verdict separates the companion map with a witness pair") {
  const EquivalenceVerdict v = decide_equivalence(eq8_map(), ftilde_map());
  REQUIRE(v.kind == Equivalence::NotEquivalent);
  CHECK(v.overlap_gap > 1e-3);
  CHECK(std::string(to_string(v.kind)) == "not-equivalent");

  const MatrixXcd pax = projector(eq8_map(), v.witness_x);
  const MatrixXcd pay = projector(eq8_map(), v.witness_y);
  const MatrixXcd pbx = projector(ftilde_map(), v.witness_x);
  const MatrixXcd pby = projector(ftilde_map(), v.witness_y);
  const double gap = std::abs((pax * pay).trace().real() - (pbx * pby).trace().real());
  CHECK(gap > v.gap_threshold);
}

TEST_CASE("verdict rejects mismatched ambient dimensions outright") {
  const GrassMap small = GrassMap::from_basis(monomial_basis(BundleSpec({1})));
  const EquivalenceVerdict v = decide_equivalence(small, eq8_map());
  CHECK(v.kind == Equivalence::NotEquivalent);
  CHECK(v.reason.find("differ") != std::string::npos);
}

TEST_CASE("independently balanced bases give equivalent embeddings") {
  const QuadratureScheme scheme = build_quadrature(16, 16);
  const BalanceReport ra = balance_iterate(random_basis(BundleSpec({1, 1}), 2), scheme);
  const BalanceReport rb = balance_iterate(random_basis(BundleSpec({1, 1}), 8), scheme);
  REQUIRE(ra.converged);
  REQUIRE(rb.converged);
  const EquivalenceVerdict v = decide_equivalence(GrassMap::from_basis(ra.final_basis),
                                                  GrassMap::from_basis(rb.final_basis));
  CHECK(v.kind == Equivalence::Equivalent);
}
