#ifndef BALMET_BUNDLE_HPP
#define BALMET_BUNDLE_HPP

#include <numeric>

#include "balmet/chart.hpp"
#include "balmet/common.hpp"

namespace balmet {

// Direct sum of line bundles O(k_1) (+) ... (+) O(k_r) over the projective
// line.  rank r = number of summands, N = dim of the global section space
// = sum (k_i + 1).  Sections of the summand O(k) are binary forms of
// degree k; the fixed monomial order inside a summand is
// z0^k, z0^{k-1} z1, ..., z1^k.
struct BundleSpec {
  std::vector<int> degrees;

  explicit BundleSpec(std::vector<int> ks) : degrees(std::move(ks)) {
    if (degrees.empty()) throw precondition_error("BundleSpec: empty degree list");
    for (int k : degrees)
      if (k < 0) throw precondition_error("BundleSpec: negative degree " + std::to_string(k));
  }

  int rank() const { return static_cast<int>(degrees.size()); }

  int sections() const {
    int n = 0;
    for (int k : degrees) n += k + 1;
    return n;
  }

  // Offset of the coefficient block of summand a.
  int block_offset(int a) const {
    int off = 0;
    for (int i = 0; i < a; ++i) off += degrees[i] + 1;
    return off;
  }

  bool operator==(const BundleSpec& o) const { return degrees == o.degrees; }
};

// Basis of the section space: row j holds the monomial coefficients of the
// j-th section, blocks ordered by summand.  The coefficient matrix is square
// (N x N) and must be invertible; rank deficiency is rejected at
// construction.
class Basis {
public:
  Basis(BundleSpec spec, MatrixXcd coeffs) : spec_(std::move(spec)), coeffs_(std::move(coeffs)) {
    const int n = spec_.sections();
    if (coeffs_.rows() != n || coeffs_.cols() != n)
      throw precondition_error("Basis: coefficient matrix must be " + std::to_string(n) + "x" +
                               std::to_string(n));
    Eigen::JacobiSVD<MatrixXcd> svd(coeffs_);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 1e-12 * sv(0)))
      throw precondition_error("Basis: coefficient matrix is numerically singular");
  }

  const BundleSpec& spec() const { return spec_; }
  const MatrixXcd& coeffs() const { return coeffs_; }
  int sections() const { return spec_.sections(); }
  int rank() const { return spec_.rank(); }

private:
  BundleSpec spec_;
  MatrixXcd coeffs_;
};

// Monomial matrix m(x): N x r, block a carries the degree-k_a monomials of
// the homogeneous coordinates in column a.  Column a is homogeneous of
// degree k_a in the chosen representative of x.
inline MatrixXcd monomial_matrix(const BundleSpec& spec, const ChartPoint& x) {
  const int n = spec.sections();
  const int r = spec.rank();
  MatrixXcd m = MatrixXcd::Zero(n, r);
  int row = 0;
  for (int a = 0; a < r; ++a) {
    const int k = spec.degrees[a];
    std::vector<cplx> z0pow(k + 1), z1pow(k + 1);
    z0pow[0] = 1.0;
    z1pow[0] = 1.0;
    for (int j = 1; j <= k; ++j) {
      z0pow[j] = z0pow[j - 1] * x.z0;
      z1pow[j] = z1pow[j - 1] * x.z1;
    }
    for (int j = 0; j <= k; ++j) m(row + j, a) = z0pow[k - j] * z1pow[j];
    row += k + 1;
  }
  return m;
}

// Frame matrix S(x): entry (j, a) is the a-th component of section j at the
// given homogeneous representative.  Column a scales like c^{k_a} under
// x -> c x.
inline MatrixXcd section_matrix(const Basis& basis, const ChartPoint& x) {
  return basis.coeffs() * monomial_matrix(basis.spec(), x);
}

// True when S(x) has full column rank r at every sample point
// (sigma_min > 1e-10 sigma_max).
inline bool rank_check(const Basis& basis, const std::vector<ChartPoint>& points) {
  for (const auto& x : points) {
    Eigen::JacobiSVD<MatrixXcd> svd(section_matrix(basis, x));
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 1e-10 * sv(0))) return false;
  }
  return true;
}

inline Basis monomial_basis(const BundleSpec& spec) {
  return Basis(spec, MatrixXcd::Identity(spec.sections(), spec.sections()));
}

// Coefficient rows drawn as standard complex Gaussians, redrawn until the
// condition number is below 1e6.  Deterministic in seed.
inline Basis random_basis(const BundleSpec& spec, std::uint64_t seed) {
  const int n = spec.sections();
  std::mt19937_64 eng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    MatrixXcd c = complex_gaussian_matrix(n, n, eng);
    Eigen::JacobiSVD<MatrixXcd> svd(c);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) > 1e-6 * sv(0)) return Basis(spec, std::move(c));
  }
  throw precondition_error("random_basis: no well-conditioned draw in 100 attempts");
}

}  // namespace balmet

#endif
