#include "wavelab/analysis.hpp"

#include "wavelab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace wavelab {

namespace {

using cd = std::complex<double>;

int branch_count(const Medium& m) { return m.physics() == Physics::acoustic ? 1 : 2; }

// Eigenvalues of P (kx Ax + ky Ay) through the congruent symmetric form
// P^{1/2} A(k) P^{1/2}; ascending.
Eigen::VectorXd symmetric_spectrum(const CoefficientMatrices& cm, double kx, double ky) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> p_eig(cm.P);
  if (p_eig.info() != Eigen::Success || p_eig.eigenvalues().minCoeff() <= 0.0)
    throw InvalidMedium("dispersion: material matrix P is not positive definite");
  const Eigen::MatrixXd p_half = p_eig.operatorSqrt();
  const Eigen::MatrixXd b = p_half * (kx * cm.Ax + ky * cm.Ay) * p_half;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b_eig(b, Eigen::EigenvaluesOnly);
  return b_eig.eigenvalues();
}

Eigen::VectorXcd sorted_by_imag(Eigen::VectorXcd v) {
  std::sort(v.data(), v.data() + v.size(), [](const cd& a, const cd& b) {
    return a.imag() < b.imag() || (a.imag() == b.imag() && a.real() < b.real());
  });
  return v;
}

}  // namespace

DispersionSample dispersion_roots(const Medium& medium, const Eigen::Vector2d& k) {
  if (!(k.norm() > 0.0)) throw ContractViolation("dispersion_roots: |k| must be > 0");
  const auto cm = coefficient_matrices(medium);
  const Eigen::VectorXd mu = symmetric_spectrum(cm, k.x(), k.y());
  DispersionSample out;
  out.k = k;
  out.roots = sorted_by_imag((cd(0.0, 1.0) * mu.cast<cd>()).eval());
  const int nb = branch_count(medium);
  out.omega_branches.resize(nb);
  for (int b = 0; b < nb; ++b) out.omega_branches(b) = mu(mu.size() - 1 - b);
  return out;
}

Eigen::VectorXd branch_frequencies(const Medium& medium, const Eigen::Vector2d& k) {
  const double kn = k.norm();
  return kn * phase_speeds(medium, k.x(), k.y());
}

Eigen::Vector2d group_velocity(const Medium& medium, const Eigen::Vector2d& k, int branch) {
  const double kn = k.norm();
  if (!(kn > 0.0)) throw ContractViolation("group_velocity: |k| must be > 0");
  if (branch < 0 || branch >= branch_count(medium))
    throw ContractViolation("group_velocity: branch index out of range");
  const Eigen::VectorXd w0 = branch_frequencies(medium, k);
  if (w0.size() > 1 && std::abs(w0(0) - w0(1)) <= 1e-6 * w0(0))
    throw DegenerateBranch("group_velocity: branches coincide at this wave vector");
  if (!(w0(branch) > 0.0))
    throw DegenerateBranch("group_velocity: branch has zero frequency");
  const double h = 1e-6 * kn;
  Eigen::Vector2d vg;
  for (int a = 0; a < 2; ++a) {
    Eigen::Vector2d kp = k, km = k;
    kp(a) += h;
    km(a) -= h;
    vg(a) = (branch_frequencies(medium, kp)(branch) - branch_frequencies(medium, km)(branch)) /
            (2.0 * h);
  }
  return vg;
}

StabilityReport geometric_stability_check(const Medium& medium, Axis axis, int n_directions) {
  if (n_directions < 16)
    throw ContractViolation("geometric_stability_check: need at least 16 directions");
  StabilityReport report;
  report.axis = axis;
  report.n_directions = n_directions;
  report.min_product = std::numeric_limits<double>::infinity();
  const int ax = static_cast<int>(axis);
  const int nb = branch_count(medium);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();

  for (int j = 0; j < n_directions; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / n_directions;
    const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
    const Eigen::VectorXd omega = branch_frequencies(medium, dir);
    for (int b = 0; b < nb; ++b) {
      Eigen::Vector2d vg;
      try {
        vg = group_velocity(medium, dir, b);
      } catch (const DegenerateBranch&) {
        if (b == 0) report.skipped_angles.push_back(angle);
        continue;
      }
      SlownessPoint pt;
      pt.branch = b;
      pt.angle = angle;
      pt.direction = dir;
      pt.slowness = dir / omega(b);
      pt.group_velocity = vg;
      for (int a = 0; a < 2; ++a) {
        if (std::abs(dir(a)) < 1e-9) {
          pt.phase_velocity(a) = inf;
          pt.product(a) = nan;
        } else {
          pt.phase_velocity(a) = omega(b) / dir(a);
          pt.product(a) = pt.phase_velocity(a) * vg(a);
        }
      }
      if (!std::isnan(pt.product(ax)) && pt.product(ax) < report.min_product) {
        report.min_product = pt.product(ax);
        report.worst = pt;
      }
      report.samples.push_back(pt);
    }
  }
  report.stable = report.min_product >= -kGscTolerance;
  return report;
}

PmlModeSpectrum pml_mode_spectrum(const Medium& medium, const Eigen::Vector2d& k,
                                  double damping, double alpha, double gamma) {
  if (!(k.norm() > 0.0)) throw ContractViolation("pml_mode_spectrum: |k| must be > 0");
  if (!(damping >= 0.0) || !(alpha >= 0.0) || !(gamma > 0.0))
    throw ContractViolation("pml_mode_spectrum: need d >= 0, alpha >= 0, gamma > 0");

  PmlModeSpectrum out;
  out.k = k;
  out.damping = damping;
  out.alpha = alpha;
  out.gamma = gamma;

  const double kscale = std::hypot(k.x() / gamma, k.y());
  const double k1 = k.x() / (gamma * kscale);
  const double k2 = k.y() / kscale;
  const double eps = damping / kscale;
  const double nu = alpha / kscale;

  const auto cm = coefficient_matrices(medium);
  const int m = medium.field_count();

  if (eps == 0.0) {
    const Eigen::VectorXd mu = symmetric_spectrum(cm, k1, k2);
    out.lambdas = sorted_by_imag((cd(0.0, 1.0) * mu.cast<cd>()).eval());
    out.max_real = 0.0;
    return out;
  }

  const Eigen::MatrixXcd mx = (cm.P * cm.Ax).cast<cd>();
  const Eigen::MatrixXcd my = (cm.P * cm.Ay).cast<cd>();
  const cd i(0.0, 1.0);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m, m);

  // Clearing the denominator lambda + nu + eps gives the quadratic pencil
  // lambda^2 I + lambda C1 + C0.
  const Eigen::MatrixXcd c1 = (nu + eps) * id - i * (k1 * mx + k2 * my);
  const Eigen::MatrixXcd c0 = -i * (k1 * nu * mx + k2 * (nu + eps) * my);
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  companion.topRightCorner(m, m) = id;
  companion.bottomLeftCorner(m, m) = -c0;
  companion.bottomRightCorner(m, m) = -c1;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success)
    throw NumericalFailure("pml_mode_spectrum: companion eigen-solve did not converge");

  const double scale = 1.0 + std::abs(k1) * mx.norm() + std::abs(k2) * my.norm();
  std::vector<cd> kept;
  std::vector<double> rejected;
  for (Eigen::Index r = 0; r < solver.eigenvalues().size(); ++r) {
    const cd lambda = solver.eigenvalues()(r);
    const cd sigma = lambda + nu + eps;
    if (std::abs(sigma) <= 1e-7 * (1.0 + std::abs(lambda))) continue;  // multiplier zero
    const Eigen::MatrixXcd rel = lambda * id - i * (k1 * (lambda + nu) / sigma) * mx - i * k2 * my;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rel);
    const double residual = svd.singularValues()(m - 1) / (scale + std::abs(lambda));
    if (residual <= 1e-6) {
      kept.push_back(lambda);
    } else {
      rejected.push_back(residual);
    }
  }
  if (!rejected.empty())
    throw NumericalFailure("pml_mode_spectrum: roots fail the dispersion-relation residual check",
                           rejected);
  out.lambdas = sorted_by_imag(Eigen::Map<Eigen::VectorXcd>(kept.data(), kept.size()));
  out.max_real = -std::numeric_limits<double>::infinity();
  for (const cd& l : kept) out.max_real = std::max(out.max_real, l.real());
  return out;
}

Medium find_violating_medium(Axis axis, double margin) {
  // Coarse grid; c12 is scanned in both signs since strong negative coupling
  // is the usual source of backward-bending slowness curves.
  const double grid[] = {1.0, 2.0, 4.0, 8.0, 16.0};
  for (double c33 : grid)
    for (double c11 : grid)
      for (double c22 : grid)
        for (int s = -15; s <= 15; ++s) {
          const double c12 = static_cast<double>(s);
          if (c11 * c22 - c12 * c12 <= 0.0) continue;
          const Medium m = Medium::elastic(1.0, c11, c12, c22, c33);
          const auto report = geometric_stability_check(m, axis, 360);
          const double cp = wave_speeds(m).cp;
          if (report.min_product < -margin * cp * cp) return m;
        }
  throw NumericalFailure("find_violating_medium: no violating medium on the scan grid");
}

}  // namespace wavelab
