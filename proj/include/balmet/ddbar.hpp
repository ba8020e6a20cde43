#ifndef BALMET_DDBAR_HPP
#define BALMET_DDBAR_HPP

#include "balmet/common.hpp"

namespace balmet {

inline constexpr double kDdbarDefaultStep = 1e-3;

// Density of (i/2) d dbar u relative to dx ^ dy in an affine chart, i.e.
// one quarter of the Laplacian.  Plain 5-point stencil, error O(step^2).
template <class F>
double ddbar_coefficient(F&& u, cplx z, double step) {
  if (!(step > 0.0)) throw precondition_error("ddbar_coefficient: step must be positive");
  const double h = step;
  const double lap = (u(z + cplx(h, 0)) + u(z - cplx(h, 0)) + u(z + cplx(0, h)) +
                      u(z - cplx(0, h)) - 4.0 * u(z)) /
                     (h * h);
  return 0.25 * lap;
}

// One Richardson level over the 5-point stencil; cancels the O(step^2) term.
template <class F>
double ddbar_coefficient_extrapolated(F&& u, cplx z, double step = kDdbarDefaultStep) {
  const double d1 = ddbar_coefficient(u, z, step);
  const double d2 = ddbar_coefficient(u, z, 0.5 * step);
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace balmet

#endif
