#ifndef BALMET_CHART_HPP
#define BALMET_CHART_HPP

#include <cmath>

#include "balmet/common.hpp"

namespace balmet {

// Point of the projective line in homogeneous coordinates [z0 : z1].
// Both coordinates vanishing is not a point and is rejected.
struct ChartPoint {
  cplx z0{1.0, 0.0};
  cplx z1{0.0, 0.0};

  ChartPoint() = default;
  ChartPoint(cplx a, cplx b) : z0(a), z1(b) {
    if (std::abs(a) == 0.0 && std::abs(b) == 0.0)
      throw precondition_error("ChartPoint: both homogeneous coordinates are zero");
  }

  // Affine chart around z0 != 0, coordinate z = z1/z0.
  static ChartPoint from_affine(cplx z) { return {cplx(1.0, 0.0), z}; }

  // Polar angles of the unit sphere; theta in (0,pi) measured from the
  // z0-axis, phi azimuthal.  Representative has |z0|^2 + |z1|^2 = 1.
  static ChartPoint from_angles(double theta, double phi) {
    return {cplx(std::cos(0.5 * theta), 0.0),
            std::sin(0.5 * theta) * cplx(std::cos(phi), std::sin(phi))};
  }

  double norm2() const { return std::norm(z0) + std::norm(z1); }

  bool in_z0_chart() const { return std::abs(z0) >= std::abs(z1); }

  // Affine coordinate z1/z0; only valid when z0 != 0.
  cplx affine() const {
    if (std::abs(z0) == 0.0)
      throw precondition_error("ChartPoint: affine coordinate requested at z0 = 0");
    return z1 / z0;
  }

  std::string str() const {
    return "[" + format_complex(z0) + " : " + format_complex(z1) + "]";
  }
};

// Fubini-Study Kaehler form scaled by lambda > 0.  In the affine chart the
// (1,1) density relative to dx ^ dy is lambda / (1 + |z|^2)^2 and the total
// volume is lambda * pi.  Normalized integrals divide the volume out, so
// lambda cancels in every averaged quantity; it is kept for reporting and
// for the Kaehler-target density lambda * fs.
struct FubiniStudyForm {
  double lambda{1.0};

  explicit FubiniStudyForm(double l = 1.0) : lambda(l) {
    if (!(l > 0.0)) throw precondition_error("FubiniStudyForm: lambda must be positive");
  }

  double density(cplx z) const {
    const double w = 1.0 + std::norm(z);
    return lambda / (w * w);
  }

  double volume() const { return lambda * 3.14159265358979323846; }
};

}  // namespace balmet

#endif
