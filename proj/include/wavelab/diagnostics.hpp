#pragma once

// Energy, norms, receivers and run-versus-reference error measurement.

#include "wavelab/solver.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace wavelab {

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Box {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  bool contains(double x, double y, double tol = 1e-9) const {
    return x >= x0 - tol && x <= x1 + tol && y >= y0 - tol && y <= y1 + tol;
  }
};

/// Which quantity a norm looks at.
struct FieldSelector {
  enum class Kind { pressure, velocity_magnitude, component };
  Kind kind = Kind::pressure;
  int index = 0;

  static FieldSelector pressure() { return {Kind::pressure, 0}; }
  static FieldSelector velocity() { return {Kind::velocity_magnitude, 0}; }
  static FieldSelector component(int i) { return {Kind::component, i}; }
  /// Pressure for acoustics, particle speed for elastic media.
  static FieldSelector natural(Physics physics) {
    return physics == Physics::acoustic ? pressure() : velocity();
  }
};

/// Field column indices the selector reads (one or two of them).
std::vector<int> selector_columns(FieldSelector sel, Physics physics);

/// Sum in a fixed pairwise tree order, independent of how `values` was filled.
double pairwise_sum(const std::vector<double>& values);

/// 1/2 sum_e J_e sum_ij h_i h_j U^T P^{-1} U.
double discrete_energy(const Discretization& disc, const Fields& fields);

/// Max over nodes of |selected field|; restricted to nodes inside `window` if given.
double linf_norm(const Discretization& disc, const Fields& fields, FieldSelector sel,
                 const std::optional<Box>& window = std::nullopt);

/// All m field values at (x, y) by tensor Lagrange interpolation.
/// Throws std::invalid_argument outside the mesh.
Eigen::VectorXd receiver_sample(const Discretization& disc, const Fields& fields, double x,
                                double y);

struct EnergySeries {
  std::vector<double> times;
  std::vector<double> values;

  /// Largest relative one-step increase (0 when monotone).
  double max_relative_increase() const;
};

/// Nodal samples restricted to the elements fully inside a box, recorded over
/// time with quadrature weights attached so runs can be compared later.
struct WindowRecord {
  Box box;
  int degree = 0;
  int channels = 0;                        // values per node
  std::vector<Eigen::Vector2d> positions;  // node coordinates
  Eigen::VectorXd weights;                 // J h_i h_j per node
  std::vector<double> times;
  std::vector<Eigen::VectorXd> samples;    // node-major, channels per node
};

WindowRecord make_window(const Discretization& disc, const Box& box, FieldSelector sel);
void record_window(WindowRecord& rec, const Discretization& disc, const Fields& fields,
                   FieldSelector sel, double t);

struct ErrorSeries {
  std::vector<double> times;
  std::vector<double> linf;
  std::vector<double> l2;

  double max_linf() const;
};

/// Difference of two window records at every common time <= horizon.
/// Throws ContractViolation when the windows do not describe the same nodes.
ErrorSeries pml_error(const WindowRecord& run, const WindowRecord& reference, double horizon);

/// Time until a wave leaving the interior box returns from a boundary at
/// distance `distance`, less one element crossing.
double validity_horizon(double distance, double cp_max, double element_size);

}  // namespace wavelab
