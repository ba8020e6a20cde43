#ifndef BALMET_COMMON_HPP
#define BALMET_COMMON_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace balmet {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Thrown when an evaluation point is geometrically inadmissible
// (basepoint of the linear system, rank drop, zero homogeneous vector).
class singular_point_error : public std::runtime_error {
public:
  explicit singular_point_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an integrand or a numerical reduction produces a non-finite
// value; the message names the offending node.
class integration_error : public std::runtime_error {
public:
  explicit integration_error(const std::string& what) : std::runtime_error(what) {}
};

// Violated caller contract (degree lists, dimension mismatches, ratio
// conditions).  Messages name the offending quantity.
class precondition_error : public std::invalid_argument {
public:
  explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed input text (expression grammar, config and report files).
class parse_error : public std::runtime_error {
public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// Uniform double in (0,1], built from the raw 64-bit stream so the values do
// not depend on the standard library's distribution implementation.
inline double uniform_unit(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace detail

// One standard complex Gaussian sample, Re and Im each N(0, 1/2) so that
// E|g|^2 = 1.  Box-Muller over the raw engine stream; deterministic in seed
// across platforms.
inline cplx complex_gaussian(std::mt19937_64& eng) {
  const double u1 = detail::uniform_unit(eng);
  const double u2 = detail::uniform_unit(eng);
  const double rad = std::sqrt(-std::log(u1));
  const double ang = 6.283185307179586476925287 * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

inline MatrixXcd complex_gaussian_matrix(int rows, int cols, std::mt19937_64& eng) {
  MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = complex_gaussian(eng);
  return m;
}

// Haar-like random unitary: QR of a Gaussian matrix with the R diagonal
// rephased.  Deterministic in seed.
inline MatrixXcd random_unitary(int n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  const MatrixXcd g = complex_gaussian_matrix(n, n, eng);
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  MatrixXcd q = qr.householderQ();
  const MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    const cplx d = r(i, i);
    q.col(i) *= (std::abs(d) > 0.0) ? d / std::abs(d) : cplx(1.0, 0.0);
  }
  return q;
}

inline std::string format_complex(cplx v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g%+.6gi", v.real(), v.imag());
  return buf;
}

}  // namespace balmet

#endif
