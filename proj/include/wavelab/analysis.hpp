#pragma once

// Plane-wave analysis: dispersion roots, slowness surfaces, group velocity,
// the geometric stability condition, and Cauchy-mode spectra of the PML.
//
// Conventions: plane waves U0 exp(s t + i k.x). Undamped roots are
// s = i * eig(P (kx Ax + ky Ay)); omega > 0 branches are numbered from the
// fastest (branch 0 = qP, branch 1 = qS for elastic media).

#include "wavelab/media.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace wavelab {

inline constexpr double kGscTolerance = 1e-10;
inline constexpr int kDefaultDirections = 720;

struct DispersionSample {
  Eigen::Vector2d k;
  Eigen::VectorXcd roots;          // all m roots, sorted by imaginary part
  Eigen::VectorXd omega_branches;  // positive frequencies, descending
};

DispersionSample dispersion_roots(const Medium& medium, const Eigen::Vector2d& k);

/// omega(k) for every propagating branch, descending. Closed form (acoustic)
/// or 2x2 Christoffel (elastic); independent of the m x m eigen-solve above.
Eigen::VectorXd branch_frequencies(const Medium& medium, const Eigen::Vector2d& k);

/// grad_k omega by central differences, step 1e-6 |k|.
/// Throws DegenerateBranch when the branch is repeated at k.
Eigen::Vector2d group_velocity(const Medium& medium, const Eigen::Vector2d& k, int branch);

struct SlownessPoint {
  int branch = 0;
  double angle = 0.0;           // radians
  Eigen::Vector2d direction;    // unit K
  Eigen::Vector2d slowness;     // k / omega
  Eigen::Vector2d phase_velocity;  // (omega/kx, omega/ky); inf where k_xi = 0
  Eigen::Vector2d group_velocity;
  Eigen::Vector2d product;      // V_p,xi * V_g,xi; NaN where k_xi = 0

  double product_along(Axis a) const { return product(static_cast<int>(a)); }
};

struct StabilityReport {
  Axis axis = Axis::x;
  int n_directions = 0;
  std::vector<SlownessPoint> samples;
  std::vector<double> skipped_angles;  // branch crossings
  double min_product = 0.0;            // along `axis`
  bool stable = true;
  std::optional<SlownessPoint> worst;  // minimizer of the product along `axis`
};

/// Sample n_directions (>= 16) uniform angles and evaluate V_p,xi V_g,xi on
/// every branch. Stable iff min >= -kGscTolerance.
StabilityReport geometric_stability_check(const Medium& medium, Axis axis,
                                          int n_directions = kDefaultDirections);

struct PmlModeSpectrum {
  Eigen::Vector2d k;
  double damping = 0.0;
  double alpha = 0.0;
  double gamma = 1.0;
  Eigen::VectorXcd lambdas;  // scaled eigenvalues s / |k|
  double max_real = 0.0;
};

/// Roots lambda of det(lambda I - i (k1/S) P Ax - i k2 P Ay) = 0 with
/// S = 1 + (d/|k|) / (lambda + alpha/|k|), for a layer damping along x.
PmlModeSpectrum pml_mode_spectrum(const Medium& medium, const Eigen::Vector2d& k,
                                  double damping, double alpha, double gamma);

/// Deterministic scan over a coarse grid of orthotropic stiffnesses (rho = 1)
/// returning the first medium that violates the geometric stability condition
/// along `axis` with min product below -margin * cp^2.
Medium find_violating_medium(Axis axis = Axis::x, double margin = 0.05);

}  // namespace wavelab
