#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "wavelab/errors.hpp"
#include "wavelab/media.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

using namespace wavelab;

TEST_CASE("acoustic-484 preset has the waveguide sound speed and impedance") {
  const Medium m = medium_preset("acoustic-484");
  CHECK(m.physics() == Physics::acoustic);
  CHECK(m.field_count() == 3);
  const auto speeds = wave_speeds(m);
  CHECK(speeds.cp == doctest::Approx(1.484).epsilon(1e-12));
  CHECK_FALSE(speeds.cs.has_value());
  CHECK(impedances(m, Axis::x).normal == doctest::Approx(1.484).epsilon(1e-12));
  CHECK_FALSE(impedances(m, Axis::y).tangential.has_value());
}

TEST_CASE("isotropic table medium: speeds and impedances") {
  const Medium m = medium_preset("iso-table1");
  const auto speeds = wave_speeds(m);
  CHECK(speeds.cp == doctest::Approx(6.0).epsilon(1e-9));
  REQUIRE(speeds.cs.has_value());
  CHECK(*speeds.cs == doctest::Approx(std::sqrt(30.17 / 2.7)).epsilon(1e-9));
  CHECK(*speeds.cs == doctest::Approx(3.3427).epsilon(1e-4));

  for (Axis a : {Axis::x, Axis::y}) {
    const auto z = impedances(m, a);
    CHECK(z.normal == doctest::Approx(16.2).epsilon(1e-9));
    REQUIRE(z.tangential.has_value());
    CHECK(*z.tangential == doctest::Approx(9.0253).epsilon(1e-4));
  }
}

TEST_CASE("AM1 is positive definite and its impedances follow the axis") {
  const Medium m = medium_preset("am1-table1");
  const auto& e = m.as_elastic();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(stiffness_matrix(e));
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
  CHECK(impedances(m, Axis::x).normal == doctest::Approx(std::sqrt(e.rho * e.c11)));
  CHECK(impedances(m, Axis::y).normal == doctest::Approx(std::sqrt(e.rho * e.c22)));
  CHECK(*impedances(m, Axis::x).tangential == doctest::Approx(std::sqrt(e.rho * e.c33)));
}

TEST_CASE("invalid media are rejected") {
  CHECK_THROWS_AS(Medium::acoustic(0.0, 1.0), InvalidMedium);
  CHECK_THROWS_AS(Medium::acoustic(1.0, -1.0), InvalidMedium);
  CHECK_THROWS_AS(Medium::elastic(1.0, 1.0, 2.0, 1.0, 1.0), InvalidMedium);  // c11 c22 < c12^2
  CHECK_THROWS_AS(Medium::elastic(1.0, 1.0, 0.0, 1.0, 0.0), InvalidMedium);
  CHECK_THROWS_AS(medium_preset("granite"), InvalidMedium);
}

TEST_CASE("acoustic coefficient matrices couple p only to the normal velocity") {
  const auto cm = coefficient_matrices(medium_preset("acoustic-484"));
  CHECK(cm.Ax(0, 1) == -1.0);
  CHECK(cm.Ax(0, 2) == 0.0);
  CHECK(cm.Ay(0, 2) == -1.0);
  CHECK(cm.Ay(0, 1) == 0.0);
  CHECK(cm.P(0, 0) == doctest::Approx(2.202256));
  CHECK(cm.P(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("coefficient matrices: symmetry, definiteness, invertibility") {
  for (const char* name : {"acoustic-484", "iso-table1", "am1-table1"}) {
    const auto cm = coefficient_matrices(medium_preset(name));
    CHECK((cm.Ax - cm.Ax.transpose()).norm() == 0.0);
    CHECK((cm.Ay - cm.Ay.transpose()).norm() == 0.0);
    CHECK((cm.P - cm.P.transpose()).norm() == 0.0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cm.P);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    const Eigen::MatrixXd id = cm.P.inverse() * cm.P;
    CHECK((id - Eigen::MatrixXd::Identity(id.rows(), id.cols())).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("boundary flux form: 1/2 U^T (n.A) U equals the power through the face") {
  std::mt19937 gen(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    const double angle = 2.0 * std::numbers::pi * trial / 50.0;
    const double nx = std::cos(angle), ny = std::sin(angle);

    const auto ca = coefficient_matrices(medium_preset("acoustic-484"));
    Eigen::VectorXd u(3);
    for (int i = 0; i < 3; ++i) u(i) = normal(gen);
    const double flux_a = 0.5 * u.dot((nx * ca.Ax + ny * ca.Ay) * u);
    CHECK(flux_a == doctest::Approx(-u(0) * (nx * u(1) + ny * u(2))).epsilon(1e-12));

    const auto ce = coefficient_matrices(medium_preset("am1-table1"));
    Eigen::VectorXd w(5);
    for (int i = 0; i < 5; ++i) w(i) = normal(gen);
    const double tx = nx * w(2) + ny * w(4);
    const double ty = nx * w(4) + ny * w(3);
    const double flux_e = 0.5 * w.dot((nx * ce.Ax + ny * ce.Ay) * w);
    CHECK(flux_e == doctest::Approx(w(0) * tx + w(1) * ty).epsilon(1e-12));
  }
}

TEST_CASE("phase speeds of an exactly isotropic solid do not depend on direction") {
  const double rho = 2.7, mu = 30.17, lambda = 97.2 - 2 * mu;
  const Medium m = Medium::elastic(rho, lambda + 2 * mu, lambda, lambda + 2 * mu, mu);
  for (int j = 0; j < 12; ++j) {
    const double a = std::numbers::pi * j / 12.0;
    const Eigen::VectorXd c = phase_speeds(m, std::cos(a), std::sin(a));
    CHECK(c(0) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(c(1) == doctest::Approx(std::sqrt(mu / rho)).epsilon(1e-12));
  }
}

TEST_CASE("scaling density and stiffness together leaves speeds unchanged") {
  const Medium m = medium_preset("am1-table1");
  const Medium s = m.scaled(3.5);
  CHECK(wave_speeds(s).cp == doctest::Approx(wave_speeds(m).cp).epsilon(1e-12));
  CHECK(*wave_speeds(s).cs == doctest::Approx(*wave_speeds(m).cs).epsilon(1e-12));
}
