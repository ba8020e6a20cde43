#ifndef BALMET_MAPS_HPP
#define BALMET_MAPS_HPP

#include "balmet/grassmann.hpp"

namespace balmet {

// Diagonal embedding of the projective line into G(2,4) through the
// permutation basis of O(1) (+) O(1): rows (z0, 0), (0, z0), (z1, 0),
// (0, z1).  Balanced, and Kaehler with pullback form twice the
// Fubini-Study form.
inline Basis eq8_basis() {
  BundleSpec spec({1, 1});
  MatrixXcd c = MatrixXcd::Zero(4, 4);
  c(0, 0) = 1.0;
  c(1, 2) = 1.0;
  c(2, 1) = 1.0;
  c(3, 3) = 1.0;
  return Basis(spec, c);
}

inline GrassMap eq8_map() { return GrassMap::from_basis(eq8_basis()); }

// Companion map into G(2,4) with the same pullback bundle, the same Ricci
// form, and the same Kaehler pullback, yet not unitarily equivalent to the
// diagonal embedding.  The entry table is fixed; tests guard it through
// rank, holomorphy, and form checks.
inline const std::vector<std::vector<std::string>>& ftilde_entries() {
  static const std::vector<std::vector<std::string>> rows = {
      {"z0^2", "z0*conj(z1)*1/2*(sqrt(3)-1)"},
      {"-z0*z1*1/2*(sqrt(3)-1)", "z0*conj(z0)+1/2*z1*conj(z1)*sqrt(3)"},
      {"-z0*z1*1/2*(sqrt(3)+1)", "-1/2*z1*conj(z1)"},
      {"z1^2", "conj(z0)*z1*1/2*(1-sqrt(3))"},
  };
  return rows;
}

inline GrassMap ftilde_map() { return GrassMap::from_expressions(ftilde_entries()); }

// SU(2)-symmetric balanced basis of O(k): binomial square roots on the
// monomials, so the frame Gram is (|z0|^2+|z1|^2)^k.
inline Basis binomial_basis(int k) {
  if (k < 0) throw precondition_error("binomial_basis: negative degree");
  const int n = k + 1;
  Eigen::VectorXd d(n);
  double c = 1.0;
  for (int a = 0; a <= k; ++a) {
    d(a) = std::sqrt(c);
    c = c * (k - a) / (a + 1);
  }
  return Basis(BundleSpec({k}), d.asDiagonal().toDenseMatrix().cast<cplx>());
}

// Left action of a constant unitary on the ambient C^N; conjugates the
// projector field pointwise.
inline GrassMap rotated_map(const GrassMap& base, const MatrixXcd& u) {
  if (u.rows() != base.sections() || u.cols() != base.sections())
    throw precondition_error("rotated_map: unitary size mismatch");
  return GrassMap::from_function(
      base.sections(), base.rank(),
      [base, u](const ChartPoint& x) -> MatrixXcd { return u * base.evaluate(x); });
}

}  // namespace balmet

#endif
