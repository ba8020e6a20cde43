#ifndef BALMET_QUADRATURE_HPP
#define BALMET_QUADRATURE_HPP

#include <cmath>
#include <type_traits>

#include "balmet/chart.hpp"
#include "balmet/common.hpp"

namespace balmet {

namespace detail {

// Gauss-Legendre rule on [-1,1].  Newton iteration on the three-term
// recurrence, initial guesses from the Chebyshev angles; converges to
// machine precision in a handful of steps for any practical n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pi = 3.14159265358979323846;
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double t = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 64; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    const double ww = 2.0 / ((1.0 - t * t) * dp * dp);
    w[i] = ww;
    w[n - 1 - i] = ww;
  }
}

template <class T>
bool value_is_finite(const T& v) {
  if constexpr (std::is_floating_point_v<T>) {
    return std::isfinite(v);
  } else if constexpr (std::is_same_v<T, cplx>) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  } else {
    return v.allFinite();
  }
}

}  // namespace detail

// Normalized cubature for the Fubini-Study measure on the projective line.
//
// The measure pushes forward to the uniform measure on the round sphere:
// with z1/z0 = tan(theta/2) e^{i phi} the normalized volume element is
// dcos(theta) dphi / (4 pi).  Nodes combine a Gauss-Legendre rule in
// cos(theta) with a uniform azimuthal rule; every node carries a unit-norm
// homogeneous representative, so rational integrands in |z0|, |z1| are
// evaluated without poles.  The overall scale of the form cancels against
// the volume normalization and never enters the weights.
//
// Exactness: integrands |z0|^{2a} |z1|^{2b} / (|z0|^2+|z1|^2)^{a+b} are
// integrated exactly whenever a+b <= n_polar - 1, and mixed phases
// e^{i k phi} vanish exactly for 0 < |k| < n_azimuthal.
struct QuadratureScheme {
  int n_polar{0};
  int n_azimuthal{0};
  std::vector<ChartPoint> nodes;
  std::vector<double> weights;  // sums to 1
};

inline QuadratureScheme build_quadrature(int n_polar, int n_azimuthal) {
  if (n_polar < 2)
    throw precondition_error("build_quadrature: n_polar must be at least 2");
  if (n_azimuthal < 4)
    throw precondition_error("build_quadrature: n_azimuthal must be at least 4");
  std::vector<double> t, w;
  detail::gauss_legendre(n_polar, t, w);

  QuadratureScheme q;
  q.n_polar = n_polar;
  q.n_azimuthal = n_azimuthal;
  q.nodes.reserve(static_cast<size_t>(n_polar) * n_azimuthal);
  q.weights.reserve(q.nodes.capacity());
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < n_polar; ++i) {
    const double theta = std::acos(t[i]);
    const double wi = 0.5 * w[i] / n_azimuthal;
    for (int j = 0; j < n_azimuthal; ++j) {
      const double phi = 2.0 * pi * j / n_azimuthal;
      q.nodes.push_back(ChartPoint::from_angles(theta, phi));
      q.weights.push_back(wi);
    }
  }
  return q;
}

// Weighted sum of f over the nodes, in fixed node order.  f may return
// double, complex, or an Eigen matrix type.  A non-finite sample aborts the
// reduction and names the node.
template <class F>
auto integrate(F&& f, const QuadratureScheme& q) {
  using R = std::decay_t<decltype(f(q.nodes[0]))>;
  if (q.nodes.empty()) throw precondition_error("integrate: empty quadrature scheme");
  R acc = f(q.nodes[0]);
  if (!detail::value_is_finite(acc))
    throw integration_error("integrate: non-finite integrand at node 0 " + q.nodes[0].str());
  acc = acc * q.weights[0];
  for (size_t i = 1; i < q.nodes.size(); ++i) {
    R v = f(q.nodes[i]);
    if (!detail::value_is_finite(v))
      throw integration_error("integrate: non-finite integrand at node " + std::to_string(i) +
                              " " + q.nodes[i].str());
    acc = acc + v * q.weights[i];
  }
  return acc;
}

}  // namespace balmet

#endif
