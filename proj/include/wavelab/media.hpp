#pragma once

#include "wavelab/axis.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <variant>

namespace wavelab {

// Units: km, s, g/cm^3, GPa. GPa / (g/cm^3) = (km/s)^2.

struct AcousticMedium {
  double rho = 1.0;    // density
  double kappa = 1.0;  // bulk modulus

  bool operator==(const AcousticMedium&) const = default;
};

/// 2D orthotropic solid, Voigt stiffness [[c11,c12,0],[c12,c22,0],[0,0,c33]].
struct ElasticMedium2D {
  double rho = 1.0;
  double c11 = 1.0;
  double c12 = 0.0;
  double c22 = 1.0;
  double c33 = 1.0;

  bool operator==(const ElasticMedium2D&) const = default;
};

enum class Physics { acoustic, elastic };

/// Immutable, validated medium. Field layout:
///   acoustic  U = (p, v_x, v_y)
///   elastic   U = (v_x, v_y, sigma_xx, sigma_yy, sigma_xy)
class Medium {
 public:
  static Medium acoustic(double rho, double kappa);
  static Medium elastic(double rho, double c11, double c12, double c22,
                        double c33);

  Physics physics() const noexcept;
  int field_count() const noexcept { return physics() == Physics::acoustic ? 3 : 5; }
  double density() const noexcept;

  const AcousticMedium& as_acoustic() const { return std::get<AcousticMedium>(params_); }
  const ElasticMedium2D& as_elastic() const { return std::get<ElasticMedium2D>(params_); }

  /// Same medium with density and stiffness multiplied by `factor`.
  Medium scaled(double factor) const;

  bool operator==(const Medium&) const = default;

 private:
  explicit Medium(std::variant<AcousticMedium, ElasticMedium2D> p) : params_(p) {}
  std::variant<AcousticMedium, ElasticMedium2D> params_;
};

/// Named presets: "acoustic-484", "iso-table1", "am1-table1".
Medium medium_preset(const std::string& name);

struct CoefficientMatrices {
  Eigen::MatrixXd P;   // material matrix, SPD
  Eigen::MatrixXd Ax;  // symmetric, non-dimensional
  Eigen::MatrixXd Ay;

  const Eigen::MatrixXd& A(Axis axis) const { return axis == Axis::x ? Ax : Ay; }
};

CoefficientMatrices coefficient_matrices(const Medium& medium);

/// 3x3 Voigt stiffness (elastic) or 1x1 [kappa] (acoustic).
Eigen::Matrix3d stiffness_matrix(const ElasticMedium2D& m);

struct WaveSpeeds {
  double cp = 0.0;
  std::optional<double> cs;  // absent for acoustics
};

/// Elastic: cp is the fastest qP phase speed over all directions, cs the
/// slowest qS phase speed.
WaveSpeeds wave_speeds(const Medium& medium);

/// Phase speeds (descending) for propagation direction (nx, ny).
Eigen::VectorXd phase_speeds(const Medium& medium, double nx, double ny);

struct Impedances {
  double normal = 0.0;                 // pressure/normal-traction pair
  std::optional<double> tangential;    // shear traction pair, elastic only
};

/// Plane-wave impedances for waves travelling along `face_normal_axis`.
Impedances impedances(const Medium& medium, Axis face_normal_axis);

}  // namespace wavelab
