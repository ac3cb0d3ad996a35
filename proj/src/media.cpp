#include "wavelab/media.hpp"

#include "wavelab/errors.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace wavelab {

namespace {

// Eigenvalues (descending) of the 2x2 Christoffel matrix divided by rho.
std::pair<double, double> christoffel_eigs(const ElasticMedium2D& m, double nx,
                                           double ny) {
  const double g11 = m.c11 * nx * nx + m.c33 * ny * ny;
  const double g22 = m.c33 * nx * nx + m.c22 * ny * ny;
  const double g12 = (m.c12 + m.c33) * nx * ny;
  const double mean = 0.5 * (g11 + g22);
  const double radius = std::hypot(0.5 * (g11 - g22), g12);
  return {(mean + radius) / m.rho, (mean - radius) / m.rho};
}

// Golden-section search for the maximum of f on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::max({f(a), f(b), fc, fd});
}

// Global maximum over angles in [0, pi): coarse scan then local refinement.
double max_over_directions(const std::function<double(double)>& f) {
  constexpr int n = 1440;
  const double step = std::numbers::pi / n;
  int best = 0;
  double best_val = f(0.0);
  for (int i = 1; i < n; ++i) {
    const double v = f(i * step);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  return std::max(best_val, golden_max(f, (best - 1) * step, (best + 1) * step));
}

void require_valid(const ElasticMedium2D& m) {
  if (!(m.rho > 0.0)) throw InvalidMedium("elastic medium: rho must be > 0");
  if (!(m.c11 > 0.0) || !(m.c33 > 0.0) || !(m.c11 * m.c22 - m.c12 * m.c12 > 0.0))
    throw InvalidMedium("elastic medium: stiffness matrix is not positive definite");
}

}  // namespace

Medium Medium::acoustic(double rho, double kappa) {
  if (!(rho > 0.0)) throw InvalidMedium("acoustic medium: rho must be > 0");
  if (!(kappa > 0.0)) throw InvalidMedium("acoustic medium: kappa must be > 0");
  return Medium(AcousticMedium{rho, kappa});
}

Medium Medium::elastic(double rho, double c11, double c12, double c22, double c33) {
  ElasticMedium2D m{rho, c11, c12, c22, c33};
  require_valid(m);
  return Medium(m);
}

Physics Medium::physics() const noexcept {
  return std::holds_alternative<AcousticMedium>(params_) ? Physics::acoustic
                                                         : Physics::elastic;
}

double Medium::density() const noexcept {
  return physics() == Physics::acoustic ? std::get<AcousticMedium>(params_).rho
                                        : std::get<ElasticMedium2D>(params_).rho;
}

Medium Medium::scaled(double factor) const {
  if (physics() == Physics::acoustic) {
    const auto& a = as_acoustic();
    return acoustic(a.rho * factor, a.kappa * factor);
  }
  const auto& e = as_elastic();
  return elastic(e.rho * factor, e.c11 * factor, e.c12 * factor, e.c22 * factor,
                 e.c33 * factor);
}

Medium medium_preset(const std::string& name) {
  if (name == "acoustic-484") return Medium::acoustic(1.0, 1.484 * 1.484);
  if (name == "iso-table1") return Medium::elastic(2.7, 97.20, 36.85, 97.20, 30.17);
  if (name == "am1-table1") return Medium::elastic(20.0 / 36.0, 20.0, 3.8, 4.0, 2.0);
  throw InvalidMedium("unknown medium preset '" + name + "'");
}

Eigen::Matrix3d stiffness_matrix(const ElasticMedium2D& m) {
  Eigen::Matrix3d c;
  c << m.c11, m.c12, 0.0,
       m.c12, m.c22, 0.0,
       0.0, 0.0, m.c33;
  return c;
}

CoefficientMatrices coefficient_matrices(const Medium& medium) {
  CoefficientMatrices out;
  if (medium.physics() == Physics::acoustic) {
    const auto& a = medium.as_acoustic();
    out.P = Eigen::MatrixXd::Zero(3, 3);
    out.P(0, 0) = a.kappa;
    out.P(1, 1) = 1.0 / a.rho;
    out.P(2, 2) = 1.0 / a.rho;
    out.Ax = Eigen::MatrixXd::Zero(3, 3);
    out.Ay = Eigen::MatrixXd::Zero(3, 3);
    out.Ax(0, 1) = out.Ax(1, 0) = -1.0;
    out.Ay(0, 2) = out.Ay(2, 0) = -1.0;
    return out;
  }
  const auto& e = medium.as_elastic();
  out.P = Eigen::MatrixXd::Zero(5, 5);
  out.P(0, 0) = out.P(1, 1) = 1.0 / e.rho;
  out.P.bottomRightCorner<3, 3>() = stiffness_matrix(e);

  // Selector blocks a_x, a_y restricted to (sxx, syy, sxy).
  Eigen::Matrix<double, 2, 3> ax, ay;
  ax << 1, 0, 0,
        0, 0, 1;
  ay << 0, 0, 1,
        0, 1, 0;
  out.Ax = Eigen::MatrixXd::Zero(5, 5);
  out.Ay = Eigen::MatrixXd::Zero(5, 5);
  out.Ax.topRightCorner<2, 3>() = ax;
  out.Ax.bottomLeftCorner<3, 2>() = ax.transpose();
  out.Ay.topRightCorner<2, 3>() = ay;
  out.Ay.bottomLeftCorner<3, 2>() = ay.transpose();
  return out;
}

Eigen::VectorXd phase_speeds(const Medium& medium, double nx, double ny) {
  const double norm = std::hypot(nx, ny);
  nx /= norm;
  ny /= norm;
  if (medium.physics() == Physics::acoustic) {
    const auto& a = medium.as_acoustic();
    return Eigen::VectorXd::Constant(1, std::sqrt(a.kappa / a.rho));
  }
  const auto [l1, l2] = christoffel_eigs(medium.as_elastic(), nx, ny);
  Eigen::VectorXd v(2);
  v << std::sqrt(l1), std::sqrt(std::max(l2, 0.0));
  return v;
}

WaveSpeeds wave_speeds(const Medium& medium) {
  if (medium.physics() == Physics::acoustic) {
    const auto& a = medium.as_acoustic();
    return {std::sqrt(a.kappa / a.rho), std::nullopt};
  }
  const auto& e = medium.as_elastic();
  require_valid(e);
  const double qp_max = max_over_directions([&](double th) {
    return christoffel_eigs(e, std::cos(th), std::sin(th)).first;
  });
  const double qs_min = -max_over_directions([&](double th) {
    return -christoffel_eigs(e, std::cos(th), std::sin(th)).second;
  });
  if (!(qs_min > 0.0)) throw InvalidMedium("elastic medium: vanishing shear speed");
  return {std::sqrt(qp_max), std::sqrt(qs_min)};
}

Impedances impedances(const Medium& medium, Axis face_normal_axis) {
  if (medium.physics() == Physics::acoustic) {
    const auto& a = medium.as_acoustic();
    return {std::sqrt(a.rho * a.kappa), std::nullopt};
  }
  // Normal incidence on an x- (y-) face sees c11 (c22) for the normal pair and
  // c33 for the tangential pair; for isotropic media these are rho*cp, rho*cs.
  const auto& e = medium.as_elastic();
  const double c_normal = face_normal_axis == Axis::x ? e.c11 : e.c22;
  return {std::sqrt(e.rho * c_normal), std::sqrt(e.rho * e.c33)};
}

}  // namespace wavelab
