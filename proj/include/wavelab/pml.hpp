#pragma once

#include "wavelab/axis.hpp"
#include "wavelab/errors.hpp"

#include <cmath>
#include <complex>

namespace wavelab {

inline constexpr double kDefaultCfsAlpha = 0.15;
inline constexpr double kDefaultPmlTol = 1e-3;

/// Damping profile for one layer along one axis. `direction` = +1 for a layer
/// beyond `interior_extent` on the positive side (east/north), -1 for a layer
/// below it on the negative side (west/south).
struct PmlProfile {
  Axis axis = Axis::x;
  int direction = 1;
  double interior_extent = 0.0;  // L
  double width = 1.0;            // delta
  double strength = 0.0;         // d0
  double exponent = 3.0;
  double cfs_alpha = kDefaultCfsAlpha;
  double gamma = 1.0;

  /// Depth into the layer; negative in the interior.
  double depth(double xi) const noexcept { return direction * (xi - interior_extent); }
  bool contains(double xi) const noexcept { return depth(xi) > 0.0; }
};

/// Throws std::invalid_argument if the profile breaks its invariants.
void validate(const PmlProfile& profile);

/// d(xi) = d0 ((xi - L)/delta)^p inside the layer, 0 in the interior,
/// clamped at d0 beyond the layer end.
double damping_at(const PmlProfile& profile, double xi);

/// d0 = 4 c_p / (2 delta) ln(1/tol).
double damping_strength(double cp, double delta, double tol);

/// S = gamma (1 + d / (s + alpha)).
template <typename Real>
std::complex<Real> stretching_metric(std::complex<Real> s, Real d, Real alpha, Real gamma) {
  const std::complex<Real> shifted = s + alpha;
  if (shifted == std::complex<Real>(0)) throw PoleError("stretching_metric: s = -alpha");
  return gamma * (Real(1) + d / shifted);
}

/// Residual of 1/S = 1/gamma - (1/S) d/(s + alpha), relative to |1/S|.
template <typename Real>
Real metric_inverse_residual(std::complex<Real> s, Real d, Real alpha, Real gamma) {
  const std::complex<Real> inv = Real(1) / stretching_metric(s, d, alpha, gamma);
  const std::complex<Real> rhs = Real(1) / gamma - inv * d / (s + alpha);
  return std::abs(inv - rhs) / std::abs(inv);
}

}  // namespace wavelab
