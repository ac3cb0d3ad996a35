#pragma once

// DG spectral-element semi-discretization of P^{-1} U_t = sum A_xi U_xi with
// PML auxiliary fields w_xi and physics-based flux fluctuations:
//
//   P^{-1} dU/dt = sum_xi [ A_xi D_xi U - d_xi w_xi - H_xi^{-1} (e(-1) FL + e(1) FR) ]
//   dw_xi/dt     = A_xi D_xi U - (d_xi + alpha_xi) w_xi
//                  - theta_xi H_xi^{-1} (e(-1) FL + e(1) FR)
//
// FL = A_xi (U^hat - U) on the low face, FR = A_xi (U - U^hat) on the high
// face, where the hat state satisfies the interface (or boundary) condition
// while keeping the element's outgoing characteristic.

#include "wavelab/media.hpp"
#include "wavelab/operators.hpp"
#include "wavelab/pml.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

namespace wavelab {

// ---------------------------------------------------------------------------
// Hat states and fluctuations

struct AcousticHat {
  double p = 0.0;
  double vn = 0.0;
};

/// Interface hat state; vn is measured along the axis pointing from L to R.
AcousticHat hat_states_acoustic(double p_left, double vn_left, double z_left,
                                double p_right, double vn_right, double z_right);

struct ElasticHat {
  Eigen::Vector2d traction;
  Eigen::Vector2d velocity;
};

/// Componentwise interface hat state. Component order is (x, y) for both
/// traction and velocity; z_* carries the impedance of each component.
ElasticHat hat_states_elastic(const Eigen::Vector2d& t_left, const Eigen::Vector2d& v_left,
                              const Eigen::Vector2d& z_left, const Eigen::Vector2d& t_right,
                              const Eigen::Vector2d& v_right, const Eigen::Vector2d& z_right);

/// Boundary condition residual G = (1-r)/2 Z v_n - n (1+r)/2 p for outward
/// normal sign n = +-1. Zero iff the trace satisfies the boundary condition.
double boundary_fluctuation_acoustic(double p, double vn, double z, double r, int sign);

/// G_eta = (1-r)/2 Z_eta v_eta + n (1+r)/2 T_eta, componentwise.
Eigen::Vector2d boundary_fluctuation_elastic(const Eigen::Vector2d& traction,
                                             const Eigen::Vector2d& velocity,
                                             const Eigen::Vector2d& z, double r, int sign);

// ---------------------------------------------------------------------------
// Mesh and configuration

struct BoundaryReflection {
  std::array<double, 4> r{-1.0, 0.0, 1.0, 1.0};  // west, east, south, north

  double at(Face f) const { return r[static_cast<int>(f)]; }
  double& at(Face f) { return r[static_cast<int>(f)]; }
};

/// Conforming K x L rectangular grid with per-element media.
class Mesh {
 public:
  Mesh(std::vector<double> x_breaks, std::vector<double> y_breaks, std::vector<Medium> media,
       std::vector<int> element_medium);

  /// Uniform elements of size h on [x0,x1]x[y0,y1], single medium.
  static Mesh uniform(double x0, double x1, double y0, double y1, double h, const Medium& medium);

  int nx() const noexcept { return static_cast<int>(x_breaks_.size()) - 1; }
  int ny() const noexcept { return static_cast<int>(y_breaks_.size()) - 1; }
  int element_count() const noexcept { return nx() * ny(); }
  int element(int k, int l) const noexcept { return k + nx() * l; }
  int column(int e) const noexcept { return e % nx(); }
  int row(int e) const noexcept { return e / nx(); }

  AffineMap map(int e) const;
  std::optional<int> neighbor(int e, Face f) const;
  const Medium& medium(int e) const { return media_[element_medium_[e]]; }
  int medium_index(int e) const { return element_medium_[e]; }
  const std::vector<Medium>& media() const noexcept { return media_; }
  const std::vector<double>& x_breaks() const noexcept { return x_breaks_; }
  const std::vector<double>& y_breaks() const noexcept { return y_breaks_; }
  Physics physics() const noexcept { return media_.front().physics(); }
  int field_count() const noexcept { return media_.front().field_count(); }

  /// Element containing (x, y); points on shared edges go to the lower index.
  std::optional<int> locate(double x, double y) const;

 private:
  std::vector<double> x_breaks_;
  std::vector<double> y_breaks_;
  std::vector<Medium> media_;
  std::vector<int> element_medium_;
};

struct SolverConfig {
  int degree = 4;
  double theta_x = 1.0;
  double theta_y = 1.0;
  double cfl = 0.9;
  double final_time = 0.0;
  BoundaryReflection boundary;

  double theta(Axis a) const { return a == Axis::x ? theta_x : theta_y; }
};

void validate(const SolverConfig& config);

// ---------------------------------------------------------------------------
// State

/// Unknowns U and auxiliary fields. Layout of `u`: element-major, then field,
/// then node n = i + (N+1) j. `wx`/`wy` use the same layout over PML slots.
struct Fields {
  Eigen::VectorXd u;
  Eigen::VectorXd wx;
  Eigen::VectorXd wy;

  Fields& operator+=(const Fields& o);
  Fields& operator*=(double a);
  /// this += a * o
  Fields& add_scaled(double a, const Fields& o);
  void set_zero();
  bool all_finite() const;
};

struct SimState {
  double t = 0.0;
  Fields fields;
};

// ---------------------------------------------------------------------------
// Discretization

class Discretization {
 public:
  Discretization(Mesh mesh, SolverConfig config, std::vector<PmlProfile> profiles = {});

  const Mesh& mesh() const noexcept { return mesh_; }
  const SolverConfig& config() const noexcept { return config_; }
  const ReferenceElement1D<double>& reference() const noexcept { return ref_; }
  const std::vector<PmlProfile>& profiles() const noexcept { return profiles_; }

  int degree() const noexcept { return ref_.degree; }
  int nodes_1d() const noexcept { return ref_.size(); }
  int nodes_per_element() const noexcept { return nodes_1d() * nodes_1d(); }
  int field_count() const noexcept { return m_; }
  int element_block() const noexcept { return m_ * nodes_per_element(); }

  /// -1 when the element carries no auxiliary field along `axis`.
  int aux_slot(int e, Axis axis) const { return aux_slot_[static_cast<int>(axis)][e]; }
  int aux_slot_count(Axis axis) const { return aux_count_[static_cast<int>(axis)]; }
  /// Nodal damping values on element e (zero vector when no layer).
  Eigen::VectorXd damping_nodes(int e, Axis axis) const;

  /// Physical coordinates of node n of element e.
  Eigen::Vector2d node_position(int e, int n) const;

  SimState zero_state() const;

  /// Element block of U as an (nodes x fields) matrix view.
  Eigen::Map<const Eigen::MatrixXd> element_view(const Eigen::VectorXd& u, int e) const;
  Eigen::Map<Eigen::MatrixXd> element_view(Eigen::VectorXd& u, int e) const;

  const CoefficientMatrices& coefficients(int e) const { return coeffs_[mesh_.medium_index(e)]; }
  const Eigen::MatrixXd& inverse_material(int e) const { return p_inverse_[mesh_.medium_index(e)]; }

  Fields rhs(const Fields& state) const;

  /// Largest P-wave speed over the media in the mesh.
  double max_wave_speed() const;

 private:
  struct ElementData {
    AffineMap map;
    std::array<Eigen::VectorXd, 2> damping;  // per axis, empty when inactive
    std::array<Eigen::VectorXd, 2> alpha;
    std::array<double, 2> gamma{1.0, 1.0};
  };

  void element_rhs(int e, const Fields& s, Fields& out) const;
  // Lifted surface term for one face, added into `surface` (nodes x fields).
  void add_face_term(int e, Face f, const Eigen::VectorXd& u, Eigen::MatrixXd& surface) const;

  Mesh mesh_;
  SolverConfig config_;
  std::vector<PmlProfile> profiles_;
  ReferenceElement1D<double> ref_;
  int m_ = 0;
  std::vector<CoefficientMatrices> coeffs_;
  std::vector<Eigen::MatrixXd> p_inverse_;
  std::vector<std::array<Impedances, 2>> impedance_;
  std::vector<ElementData> elements_;
  std::array<std::vector<int>, 2> aux_slot_;
  std::array<int, 2> aux_count_{0, 0};
  int threads_ = 1;
};

/// dt = CFL min(dx, dy) / (sqrt(2) (2N+1) c_p,max).
double timestep(const SolverConfig& config, const Mesh& mesh);

/// Classical RK4 step; throws UnstableRun if the result is not finite.
template <typename Rhs>
SimState advance(const SimState& state, double dt, const Rhs& rhs) {
  const Fields k1 = rhs(state.fields);
  Fields stage = state.fields;
  stage.add_scaled(0.5 * dt, k1);
  const Fields k2 = rhs(stage);
  stage = state.fields;
  stage.add_scaled(0.5 * dt, k2);
  const Fields k3 = rhs(stage);
  stage = state.fields;
  stage.add_scaled(dt, k3);
  const Fields k4 = rhs(stage);

  SimState next = state;
  next.fields.add_scaled(dt / 6.0, k1);
  next.fields.add_scaled(dt / 3.0, k2);
  next.fields.add_scaled(dt / 3.0, k3);
  next.fields.add_scaled(dt / 6.0, k4);
  next.t = state.t + dt;
  if (!next.fields.all_finite()) throw UnstableRun("non-finite state", next.t);
  return next;
}

}  // namespace wavelab
