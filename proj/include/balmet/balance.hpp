#ifndef BALMET_BALANCE_HPP
#define BALMET_BALANCE_HPP

#include <map>
#include <numeric>

#include "balmet/grassmann.hpp"
#include "balmet/quadrature.hpp"

namespace balmet {

// Averaged frame Gram of a section basis: the quadrature mean of the
// projector field.  Hermitian positive semidefinite with trace equal to the
// rank for any basis; the basis is balanced exactly when the matrix is
// (r/N) times the identity.
struct GramMatrix {
  MatrixXcd entries;
  int rank_r{0};
  int dim_n{0};
  int n_polar{0};
  int n_azimuthal{0};

  double target_ratio() const { return static_cast<double>(rank_r) / dim_n; }

  double residual() const {
    return (entries - target_ratio() * MatrixXcd::Identity(dim_n, dim_n)).norm();
  }
};

inline GramMatrix gram(const GrassMap& map, const QuadratureScheme& scheme) {
  MatrixXcd g = integrate([&](const ChartPoint& x) { return projector(map, x); }, scheme);
  g = 0.5 * (g + MatrixXcd(g.adjoint()));
  return GramMatrix{std::move(g), map.rank(), map.sections(), scheme.n_polar,
                    scheme.n_azimuthal};
}

inline GramMatrix gram(const Basis& basis, const QuadratureScheme& scheme) {
  return gram(GrassMap::from_basis(basis), scheme);
}

inline bool is_balanced(const GramMatrix& g, double tol = 1e-8) { return g.residual() <= tol; }

// Moment map data: the reproducing part measures the pointwise identity
// sum_j h(., s_j) s_j = id (automatically near zero for every basis, up to
// conditioning), the traceless part is the Gram deviation from a multiple
// of the identity.
struct MomentMapData {
  double reproducing_defect{0.0};
  MatrixXcd traceless_part;
};

inline MomentMapData moment_map(const GrassMap& map, const QuadratureScheme& scheme,
                                const std::vector<ChartPoint>& sample) {
  const int r = map.rank();
  double defect = 0.0;
  for (const auto& x : sample) {
    const MatrixXcd s = map.evaluate(x);
    // Frame matrix of sum_j h(., s_j) s_j: metric factor assembled from the
    // frame Gram, section factor from the row outer products.
    MatrixXcd outer = MatrixXcd::Zero(r, r);
    for (int j = 0; j < map.sections(); ++j)
      outer += s.row(j).transpose() * s.row(j).conjugate();
    const MatrixXcd t = s.adjoint() * s;
    Eigen::LDLT<MatrixXcd> ldlt(t);
    if (ldlt.info() != Eigen::Success)
      throw singular_point_error("moment_map: frame matrix singular at " + x.str());
    const MatrixXcd hframe = ldlt.solve(MatrixXcd::Identity(r, r)).transpose();
    defect = std::max(defect, (hframe * outer - MatrixXcd::Identity(r, r)).norm());
  }
  const GramMatrix g = gram(map, scheme);
  MatrixXcd traceless =
      g.entries - (g.entries.trace() / static_cast<double>(g.dim_n)) *
                      MatrixXcd::Identity(g.dim_n, g.dim_n);
  return MomentMapData{defect, std::move(traceless)};
}

inline MomentMapData moment_map(const Basis& basis, const QuadratureScheme& scheme,
                                const std::vector<ChartPoint>& sample) {
  return moment_map(GrassMap::from_basis(basis), scheme, sample);
}

namespace detail {

// Inverse Hermitian square root with spectral floor; rejects non-positive
// spectra outright.
inline MatrixXcd inverse_sqrt(const MatrixXcd& g, double floor = 1e-14) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g);
  if (es.info() != Eigen::Success)
    throw precondition_error("inverse_sqrt: eigendecomposition failed");
  VectorXd ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0.0))
    throw precondition_error("inverse_sqrt: Gram matrix is numerically singular");
  for (int i = 0; i < ev.size(); ++i) ev(i) = 1.0 / std::sqrt(std::max(ev(i), floor));
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

// One whitening step: left-multiply the coefficient rows by G^{-1/2}.  A
// balanced input returns unchanged up to the global scalar sqrt(N/r), which
// moves neither the projector field nor the Gram.
inline Basis t_step(const Basis& basis, const QuadratureScheme& scheme) {
  const GramMatrix g = gram(basis, scheme);
  return Basis(basis.spec(), detail::inverse_sqrt(g.entries) * basis.coeffs());
}

// Coefficient realization of the constant right gauge S -> S A for an
// r x r gauge A supported inside equal-degree summand classes: A spreads
// over the monomial indices of each class.  Entries of A coupling summands
// of different degree are rejected, no polynomial identity realizes them.
inline MatrixXcd right_gauge_matrix(const BundleSpec& spec, const MatrixXcd& a) {
  const int r = spec.rank();
  if (a.rows() != r || a.cols() != r)
    throw precondition_error("right_gauge_matrix: gauge must be rank x rank");
  const int n = spec.sections();
  MatrixXcd ma = MatrixXcd::Zero(n, n);
  for (int al = 0; al < r; ++al)
    for (int be = 0; be < r; ++be) {
      if (a(al, be) == cplx(0.0, 0.0)) continue;
      if (spec.degrees[al] != spec.degrees[be])
        throw precondition_error("right_gauge_matrix: gauge couples different degrees");
      const int k = spec.degrees[al];
      for (int j = 0; j <= k; ++j)
        ma(spec.block_offset(al) + j, spec.block_offset(be) + j) = a(al, be);
    }
  return ma;
}

// Constant right gauge by the inverse square root of the averaged frame
// Gram, applied inside every class of equal-degree summands.  Leaves the
// projector field and the Gram untouched and pins the automorphism and
// scale freedom of the limit, so converged metrics are comparable across
// runs.
inline Basis gauge_normalize(const Basis& basis, const QuadratureScheme& scheme) {
  const BundleSpec& spec = basis.spec();
  const int r = spec.rank();
  const MatrixXcd t =
      integrate([&](const ChartPoint& x) { return MatrixXcd(section_matrix(basis, x).adjoint() *
                                                            section_matrix(basis, x)); },
                scheme);

  MatrixXcd a = MatrixXcd::Zero(r, r);
  std::map<int, std::vector<int>> classes;
  for (int i = 0; i < r; ++i) classes[spec.degrees[i]].push_back(i);
  for (const auto& [deg, idx] : classes) {
    const int m = static_cast<int>(idx.size());
    MatrixXcd block(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) block(i, j) = t(idx[i], idx[j]);
    block = 0.5 * (block + MatrixXcd(block.adjoint()));
    const MatrixXcd w = detail::inverse_sqrt(block);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) a(idx[i], idx[j]) = w(i, j);
  }
  return Basis(spec, basis.coeffs() * right_gauge_matrix(spec, a));
}

struct BalanceReport {
  bool converged{false};
  int iterations{0};
  std::vector<double> residual_history;
  double tolerance{0.0};
  int max_iterations{0};
  int n_polar{0};
  int n_azimuthal{0};
  Basis final_basis;
};

// Fixed-point iteration of the whitening step with a global rescale that
// keeps balanced bases exactly fixed.  Residuals are recorded per iterate,
// starting with the initial basis.  Non-convergence is reported, not
// thrown; the iteration also stops early if the coefficient matrix
// degenerates, which happens when no balanced basis exists and one summand
// class starves.
inline BalanceReport balance_iterate(const Basis& start, const QuadratureScheme& scheme,
                                     double tol = 1e-10, int max_iter = 500) {
  if (!(tol > 0.0)) throw precondition_error("balance_iterate: tolerance must be positive");
  if (max_iter < 1) throw precondition_error("balance_iterate: max_iter must be positive");
  Basis b = start;
  const double scalar = std::sqrt(static_cast<double>(start.rank()) / start.sections());
  std::vector<double> history;
  bool converged = false;
  int steps = 0;
  for (;;) {
    GramMatrix g;
    try {
      g = gram(b, scheme);
    } catch (const singular_point_error&) {
      if (steps == 0) throw;  // the start itself drops rank somewhere
      break;                  // a summand class starved below pointwise rank
    }
    history.push_back(g.residual());
    if (g.residual() <= tol) {
      converged = true;
      break;
    }
    if (steps >= max_iter) break;
    const MatrixXcd next = scalar * (detail::inverse_sqrt(g.entries) * b.coeffs());
    Eigen::JacobiSVD<MatrixXcd> svd(next);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 1e-11 * sv(0))) break;  // degenerating, no fixed point this way
    b = Basis(b.spec(), next);
    ++steps;
  }
  return BalanceReport{converged,
                       steps,
                       std::move(history),
                       tol,
                       max_iter,
                       scheme.n_polar,
                       scheme.n_azimuthal,
                       gauge_normalize(b, scheme)};
}

// Block-diagonal join of two bases.  Requires the two section-count ratios
// to agree exactly as rationals; the result is then balanced whenever both
// inputs are.
inline Basis direct_sum(const Basis& a, const Basis& b) {
  const long ra = a.rank(), na = a.sections();
  const long rb = b.rank(), nb = b.sections();
  if (ra * nb != rb * na) {
    auto reduced = [](long r, long n) {
      const long g = std::gcd(r, n);
      return std::to_string(r / g) + "/" + std::to_string(n / g);
    };
    throw precondition_error("direct_sum: section ratios differ, " + reduced(ra, na) +
                             " versus " + reduced(rb, nb));
  }
  std::vector<int> degrees = a.spec().degrees;
  degrees.insert(degrees.end(), b.spec().degrees.begin(), b.spec().degrees.end());
  const int n = static_cast<int>(na + nb);
  MatrixXcd c = MatrixXcd::Zero(n, n);
  c.topLeftCorner(na, na) = a.coeffs();
  c.bottomRightCorner(nb, nb) = b.coeffs();
  return Basis(BundleSpec(std::move(degrees)), std::move(c));
}

}  // namespace balmet

#endif
