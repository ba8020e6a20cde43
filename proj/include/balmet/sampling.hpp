#ifndef BALMET_SAMPLING_HPP
#define BALMET_SAMPLING_HPP

#include <algorithm>
#include <cmath>

#include "balmet/chart.hpp"

namespace balmet {

// Spherical Fibonacci lattice, pole-free since cos(theta) stays interior.
// Primary deterministic sample for pointwise checks.
inline std::vector<ChartPoint> fibonacci_points(int n) {
  if (n < 1) throw precondition_error("fibonacci_points: n must be positive");
  std::vector<ChartPoint> pts;
  pts.reserve(n);
  const double golden = 0.6180339887498948482;
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < n; ++i) {
    const double t = 1.0 - 2.0 * (i + 0.5) / n;
    const double phi = 2.0 * pi * std::fmod(i * golden, 1.0);
    pts.push_back(ChartPoint::from_angles(std::acos(t), phi));
  }
  return pts;
}

namespace detail {

inline double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

}  // namespace detail

// Halton (2,3) stream, independent of the Fibonacci sample; used for fresh
// validation points.  offset skips ahead in the stream.
inline std::vector<ChartPoint> halton_points(int n, int offset = 0) {
  if (n < 1) throw precondition_error("halton_points: n must be positive");
  std::vector<ChartPoint> pts;
  pts.reserve(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < n; ++i) {
    const double u = detail::halton(i + offset + 1, 2);
    const double v = detail::halton(i + offset + 1, 3);
    const double t = std::clamp(2.0 * u - 1.0, -0.999, 0.999);
    pts.push_back(ChartPoint::from_angles(std::acos(t), 2.0 * pi * v));
  }
  return pts;
}

}  // namespace balmet

#endif
