#ifndef BALMET_RIGIDITY_HPP
#define BALMET_RIGIDITY_HPP

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "balmet/grassmann.hpp"
#include "balmet/sampling.hpp"

namespace balmet {

namespace detail {

inline std::vector<MatrixXcd> projector_field(const GrassMap& map,
                                              const std::vector<ChartPoint>& points) {
  std::vector<MatrixXcd> out;
  out.reserve(points.size());
  for (const auto& x : points) out.push_back(projector(map, x));
  return out;
}

}  // namespace detail

// Largest discrepancy between the two-point functions tr(P(x)P(y)) of two
// maps over all pairs from the sample.  Conjugating one map by a constant
// unitary leaves every such value fixed, so a positive gap certifies that
// no unitary can match the maps on the sample.
struct OverlapReport {
  double max_gap{0.0};
  ChartPoint witness_x;
  ChartPoint witness_y;
};

inline OverlapReport overlap_invariant(const GrassMap& a, const GrassMap& b,
                                       const std::vector<ChartPoint>& points) {
  if (points.size() < 2)
    throw precondition_error("overlap_invariant: need at least two sample points");
  const auto pa = detail::projector_field(a, points);
  const auto pb = detail::projector_field(b, points);
  OverlapReport rep{0.0, points[0], points[1]};
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j) {
      const double ta = (pa[i] * pa[j]).trace().real();
      const double tb = (pb[i] * pb[j]).trace().real();
      const double gap = std::abs(ta - tb);
      if (gap > rep.max_gap) rep = OverlapReport{gap, points[i], points[j]};
    }
  return rep;
}

namespace detail {

inline MatrixXcd polar_unitary(const MatrixXcd& m) {
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

inline double conjugation_residual(const MatrixXcd& u, const std::vector<MatrixXcd>& pa,
                                   const std::vector<MatrixXcd>& pb) {
  double worst = 0.0;
  for (size_t i = 0; i < pa.size(); ++i)
    worst = std::max(worst, (u * pa[i] * u.adjoint() - pb[i]).norm());
  return worst;
}

// Ascent on sum_i Re tr(P_b,i U P_a,i U*): each sweep replaces U by the
// unitary polar factor of sum_i P_b,i U P_a,i, which never decreases the
// objective.  An exact conjugation is a fixed point.
inline MatrixXcd align_from(MatrixXcd u, const std::vector<MatrixXcd>& pa,
                            const std::vector<MatrixXcd>& pb, int max_sweeps = 300) {
  const int n = static_cast<int>(u.rows());
  double prev = -std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    MatrixXcd m = MatrixXcd::Zero(n, n);
    for (size_t i = 0; i < pa.size(); ++i) m += pb[i] * u * pa[i];
    u = polar_unitary(m);
    double obj = 0.0;
    for (size_t i = 0; i < pa.size(); ++i)
      obj += (pb[i] * u * pa[i] * u.adjoint()).trace().real();
    if (obj - prev < 1e-13 * n) break;
    prev = obj;
  }
  return u;
}

// Start guess pairing the eigenvector frames of the averaged projectors,
// eigenvalues sorted the same way on both sides.
inline MatrixXcd spectral_start(const std::vector<MatrixXcd>& pa,
                                const std::vector<MatrixXcd>& pb) {
  const int n = static_cast<int>(pa[0].rows());
  MatrixXcd ma = MatrixXcd::Zero(n, n), mb = MatrixXcd::Zero(n, n);
  for (size_t i = 0; i < pa.size(); ++i) {
    ma += pa[i];
    mb += pb[i];
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> ea(ma), eb(mb);
  return eb.eigenvectors() * ea.eigenvectors().adjoint();
}

}  // namespace detail

// Best constant unitary taking the first projector field to the second on
// the given sample, chosen over several ascent starts.
struct AlignmentResult {
  MatrixXcd unitary;
  double residual{std::numeric_limits<double>::infinity()};
};

inline AlignmentResult find_unitary(const GrassMap& a, const GrassMap& b,
                                    const std::vector<ChartPoint>& points,
                                    int random_starts = 8, unsigned seed_base = 1000) {
  if (a.sections() != b.sections())
    throw precondition_error("find_unitary: section counts differ");
  const auto pa = detail::projector_field(a, points);
  const auto pb = detail::projector_field(b, points);
  const int n = a.sections();

  std::vector<MatrixXcd> starts;
  starts.push_back(MatrixXcd::Identity(n, n));
  starts.push_back(detail::spectral_start(pa, pb));
  for (int s = 0; s < random_starts; ++s)
    starts.push_back(random_unitary(n, seed_base + static_cast<unsigned>(s)));

  AlignmentResult best;
  for (const auto& u0 : starts) {
    const MatrixXcd u = detail::align_from(u0, pa, pb);
    const double res = detail::conjugation_residual(u, pa, pb);
    if (res < best.residual) best = AlignmentResult{u, res};
  }
  return best;
}

enum class Equivalence { Equivalent, NotEquivalent, Inconclusive };

inline const char* to_string(Equivalence e) {
  switch (e) {
    case Equivalence::Equivalent: return "equivalent";
    case Equivalence::NotEquivalent: return "not-equivalent";
    default: return "inconclusive";
  }
}

struct EquivalenceVerdict {
  Equivalence kind{Equivalence::Inconclusive};
  std::string reason;
  MatrixXcd unitary;               // meaningful for Equivalent
  double overlap_gap{0.0};         // two-point invariant gap on the sample
  ChartPoint witness_x;            // pair realizing the gap
  ChartPoint witness_y;
  double alignment_residual{0.0};  // best residual on the alignment sample
  double validation_residual{0.0}; // residual on fresh points
  double gap_threshold{0.0};
  double residual_threshold{0.0};
};

// Three-way decision.  A gap in the unitary-invariant two-point function is
// a proof of non-equivalence and comes with the witnessing pair; a tiny
// conjugation residual on points not used for the search certifies
// equivalence up to that tolerance; anything else stays inconclusive.
inline EquivalenceVerdict decide_equivalence(const GrassMap& a, const GrassMap& b,
                                             int sample_size = 30, int validation_size = 50,
                                             double gap_threshold = 1e-5,
                                             double residual_threshold = 1e-6) {
  EquivalenceVerdict v;
  v.gap_threshold = gap_threshold;
  v.residual_threshold = residual_threshold;
  if (a.sections() != b.sections() || a.rank() != b.rank()) {
    v.kind = Equivalence::NotEquivalent;
    v.reason = "section counts or ranks differ";
    v.overlap_gap = std::numeric_limits<double>::infinity();
    return v;
  }

  const auto sample = fibonacci_points(sample_size);
  const OverlapReport overlap = overlap_invariant(a, b, sample);
  v.overlap_gap = overlap.max_gap;
  v.witness_x = overlap.witness_x;
  v.witness_y = overlap.witness_y;
  if (overlap.max_gap > gap_threshold) {
    v.kind = Equivalence::NotEquivalent;
    v.reason = "two-point overlap functions differ on the sample";
    return v;
  }

  const AlignmentResult best = find_unitary(a, b, sample);
  v.unitary = best.unitary;
  v.alignment_residual = best.residual;

  const auto fresh = halton_points(validation_size, 101);
  const auto pa = detail::projector_field(a, fresh);
  const auto pb = detail::projector_field(b, fresh);
  v.validation_residual = detail::conjugation_residual(best.unitary, pa, pb);

  if (v.validation_residual <= residual_threshold) {
    v.kind = Equivalence::Equivalent;
    v.reason = "constant unitary matches the projector fields on fresh points";
  } else {
    v.kind = Equivalence::Inconclusive;
    v.reason = "no separating invariant found and no certified unitary either";
  }
  return v;
}

}  // namespace balmet

#endif
