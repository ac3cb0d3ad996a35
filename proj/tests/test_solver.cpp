#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "wavelab/diagnostics.hpp"
#include "wavelab/errors.hpp"
#include "wavelab/solver.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>

using namespace wavelab;

namespace {

Fields random_fields(const Discretization& disc, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Fields f = disc.zero_state().fields;
  for (Eigen::Index i = 0; i < f.u.size(); ++i) f.u(i) = normal(gen);
  for (Eigen::Index i = 0; i < f.wx.size(); ++i) f.wx(i) = normal(gen);
  for (Eigen::Index i = 0; i < f.wy.size(); ++i) f.wy(i) = normal(gen);
  return f;
}

PmlProfile east_profile(double x_interface, double width, double strength) {
  PmlProfile p;
  p.axis = Axis::x;
  p.direction = 1;
  p.interior_extent = x_interface;
  p.width = width;
  p.strength = strength;
  p.cfs_alpha = 0.15;
  return p;
}

double max_abs_diff(const Fields& a, const Fields& b) {
  double d = (a.u - b.u).cwiseAbs().maxCoeff();
  if (a.wx.size()) d = std::max(d, (a.wx - b.wx).cwiseAbs().maxCoeff());
  if (a.wy.size()) d = std::max(d, (a.wy - b.wy).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace

TEST_CASE("acoustic hat states") {
  // Equal impedances: average of the characteristic data.
  const double z = 2.5;
  const auto h = hat_states_acoustic(1.0, 0.0, z, 0.0, 0.0, z);
  CHECK(h.vn == doctest::Approx(1.0 / (2.0 * z)));
  CHECK(h.p == doctest::Approx(0.5));

  const auto g = hat_states_acoustic(1.0, 0.0, 1.0, 0.0, 0.0, 3.0);
  CHECK(g.vn == doctest::Approx(0.25));
  CHECK(g.p == doctest::Approx(0.75));

  // Continuous traces are reproduced exactly.
  const auto c = hat_states_acoustic(0.7, -0.2, 1.0, 0.7, -0.2, 4.0);
  CHECK(c.p == doctest::Approx(0.7));
  CHECK(c.vn == doctest::Approx(-0.2));
}

TEST_CASE("elastic hat states") {
  const Eigen::Vector2d z(16.2, 9.0253);
  const auto h = hat_states_elastic({1.0, -2.0}, {0.3, 0.1}, z, {3.0, 2.0}, {0.3, 0.1}, z);
  CHECK(h.traction.x() == doctest::Approx(2.0));
  CHECK(h.traction.y() == doctest::Approx(0.0));
  CHECK(h.velocity.x() == doctest::Approx(0.3 + 1.0 / 16.2));
  CHECK(h.velocity.y() == doctest::Approx(0.1 + 2.0 / 9.0253));

  const auto c = hat_states_elastic({1.0, 2.0}, {3.0, 4.0}, z, {1.0, 2.0}, {3.0, 4.0}, {1.0, 7.0});
  CHECK((c.traction - Eigen::Vector2d(1.0, 2.0)).norm() < 1e-14);
  CHECK((c.velocity - Eigen::Vector2d(3.0, 4.0)).norm() < 1e-14);
}

TEST_CASE("boundary fluctuations") {
  // Pressure-release wall with p = 0.3 and no motion.
  CHECK(boundary_fluctuation_acoustic(0.3, 0.0, 1.484, 1.0, 1) == doctest::Approx(-0.3));
  CHECK(boundary_fluctuation_acoustic(0.3, 0.0, 1.484, 1.0, -1) == doctest::Approx(0.3));
  // Outgoing characteristic only: nothing to correct on an absorbing face.
  CHECK(boundary_fluctuation_acoustic(2.0, 1.0, 2.0, 0.0, 1) == doctest::Approx(0.0));
  // Rigid wall residual is Z v.
  CHECK(boundary_fluctuation_acoustic(5.0, 0.5, 2.0, -1.0, 1) == doctest::Approx(1.0));

  const Eigen::Vector2d z(2.0, 1.0);
  const Eigen::Vector2d g = boundary_fluctuation_elastic({0.4, -0.2}, {0.0, 0.0}, z, 1.0, 1);
  CHECK(g.x() == doctest::Approx(0.4));
  CHECK(g.y() == doctest::Approx(-0.2));
  const Eigen::Vector2d a = boundary_fluctuation_elastic({-2.0, -1.0}, {1.0, 1.0}, z, 0.0, 1);
  CHECK(a.norm() < 1e-15);
}

TEST_CASE("mesh construction, neighbours and point location") {
  const Mesh m = Mesh::uniform(-50.0, 60.0, 0.0, 50.0, 5.0, medium_preset("acoustic-484"));
  CHECK(m.nx() == 22);
  CHECK(m.ny() == 10);
  CHECK(m.element_count() == 220);
  CHECK_FALSE(m.neighbor(0, Face::west).has_value());
  CHECK(m.neighbor(0, Face::east).value() == 1);
  CHECK(m.neighbor(0, Face::north).value() == 22);
  CHECK_FALSE(m.neighbor(219, Face::north).has_value());

  const AffineMap map = m.map(m.element(3, 2));
  CHECK(map.x0 == doctest::Approx(-35.0));
  CHECK(map.y1 == doctest::Approx(15.0));

  CHECK(m.locate(-49.0, 1.0).value() == 0);
  CHECK(m.locate(-45.0, 1.0).value() == 0);  // shared edge goes to the lower index
  CHECK(m.locate(60.0, 50.0).value() == 219);
  CHECK_FALSE(m.locate(61.0, 1.0).has_value());

  CHECK_THROWS_AS(Mesh({0.0, 1.0}, {0.0, 1.0}, {}, {0}), ContractViolation);
  CHECK_THROWS_AS(Mesh({0.0, 1.0, 0.5}, {0.0, 1.0}, {medium_preset("acoustic-484")}, {0, 0}),
                  ContractViolation);
}

TEST_CASE("solver configuration validation") {
  SolverConfig c;
  CHECK_NOTHROW(validate(c));
  c.boundary.at(Face::east) = 1.5;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = SolverConfig{};
  c.cfl = 0.0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = SolverConfig{};
  c.theta_x = -0.1;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("time step formula") {
  SolverConfig c;
  c.degree = 4;
  const Mesh ac = Mesh::uniform(-50.0, 60.0, 0.0, 50.0, 5.0, medium_preset("acoustic-484"));
  CHECK(timestep(c, ac) == doctest::Approx(0.238243).epsilon(1e-5));
  const Mesh el = Mesh::uniform(-50.0, 60.0, 0.0, 50.0, 5.0, medium_preset("iso-table1"));
  CHECK(timestep(c, el) == doctest::Approx(0.0589256).epsilon(1e-5));
  SolverConfig c8 = c;
  c8.degree = 8;
  CHECK(timestep(c8, ac) / timestep(c, ac) == doctest::Approx(9.0 / 17.0).epsilon(1e-14));
}

TEST_CASE("constant states have zero right-hand side") {
  for (const char* name : {"acoustic-484", "am1-table1"}) {
    const Medium med = medium_preset(name);
    SolverConfig c;
    c.degree = 3;
    c.boundary.r = {0.0, 0.0, 0.0, 0.0};
    // Boundary faces see the constant as data to absorb, so only an element
    // whose faces are all shared is checked.
    const Mesh mesh = Mesh::uniform(0.0, 4.0, 0.0, 4.0, 1.0, med);
    const Discretization disc(mesh, c);
    Fields f = disc.zero_state().fields;
    for (int e = 0; e < mesh.element_count(); ++e) {
      auto v = disc.element_view(f.u, e);
      for (int k = 0; k < disc.field_count(); ++k) v.col(k).setConstant(0.1 * (k + 1));
    }
    const Fields r = disc.rhs(f);
    const int interior = mesh.element(1, 1);
    CHECK(disc.element_view(r.u, interior).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("zero state has zero right-hand side and rhs is linear") {
  const Mesh mesh = Mesh::uniform(0.0, 30.0, 0.0, 20.0, 5.0, medium_preset("iso-table1"));
  SolverConfig c;
  c.degree = 3;
  const Discretization disc(mesh, c, {east_profile(20.0, 10.0, 3.0)});
  const Fields zero = disc.zero_state().fields;
  const Fields r0 = disc.rhs(zero);
  CHECK(r0.u.cwiseAbs().maxCoeff() == 0.0);

  const Fields a = random_fields(disc, 1), b = random_fields(disc, 2);
  Fields ab = a;
  ab *= 2.0;
  ab.add_scaled(-3.0, b);
  Fields expect = disc.rhs(a);
  expect *= 2.0;
  expect.add_scaled(-3.0, disc.rhs(b));
  CHECK(max_abs_diff(disc.rhs(ab), expect) < 1e-9 * std::max(1.0, expect.u.cwiseAbs().maxCoeff()));
}

TEST_CASE("auxiliary slots exist only where damping is active") {
  const Mesh mesh = Mesh::uniform(0.0, 30.0, 0.0, 10.0, 5.0, medium_preset("acoustic-484"));
  SolverConfig c;
  c.degree = 2;
  const Discretization disc(mesh, c, {east_profile(20.0, 10.0, 2.0)});
  CHECK(disc.aux_slot_count(Axis::x) == 4);
  CHECK(disc.aux_slot_count(Axis::y) == 0);
  CHECK(disc.aux_slot(0, Axis::x) == -1);
  CHECK(disc.aux_slot(mesh.element(4, 0), Axis::x) >= 0);
  CHECK(disc.damping_nodes(mesh.element(5, 1), Axis::x).maxCoeff() == doctest::Approx(2.0));
}

TEST_CASE("theta has no effect when damping vanishes") {
  const Mesh mesh = Mesh::uniform(0.0, 30.0, 0.0, 20.0, 5.0, medium_preset("am1-table1"));
  SolverConfig c0, c1;
  c0.degree = c1.degree = 3;
  c0.theta_x = 0.0;
  c1.theta_x = 1.0;
  const Discretization d0(mesh, c0, {east_profile(20.0, 10.0, 0.0)});
  const Discretization d1(mesh, c1, {east_profile(20.0, 10.0, 0.0)});
  // d = 0 everywhere: no auxiliary slots are allocated at all.
  CHECK(d0.aux_slot_count(Axis::x) == 0);
  const Fields f = random_fields(d0, 5);
  CHECK(max_abs_diff(d0.rhs(f), d1.rhs(f)) == 0.0);
}

TEST_CASE("closed-box energy does not grow") {
  for (const char* name : {"acoustic-484", "iso-table1"}) {
    CAPTURE(name);
    const Medium med = medium_preset(name);
    SolverConfig c;
    c.degree = 4;
    c.boundary.r = {-1.0, 1.0, -1.0, 1.0};
    const Mesh mesh = Mesh::uniform(0.0, 10.0, 0.0, 10.0, 5.0, med);
    const Discretization disc(mesh, c);
    SimState s = disc.zero_state();
    s.fields = random_fields(disc, 17);
    // Nodal noise is the harshest input: every face jump is large.
    const double dt = timestep(c, mesh);
    auto rhs = [&](const Fields& f) { return disc.rhs(f); };
    double last = discrete_energy(disc, s.fields);
    double worst = -1.0;
    for (int step = 0; step < 100; ++step) {
      s = advance(s, dt, rhs);
      const double e = discrete_energy(disc, s.fields);
      worst = std::max(worst, (e - last) / last);
      last = e;
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("single element with rigid walls conserves energy to RK4 accuracy") {
  const Medium med = medium_preset("acoustic-484");
  SolverConfig c;
  c.degree = 6;
  c.boundary.r = {-1.0, -1.0, -1.0, -1.0};
  const Mesh mesh = Mesh::uniform(-1.0, 1.0, -1.0, 1.0, 2.0, med);
  const Discretization disc(mesh, c);
  SimState s = disc.zero_state();
  auto v = disc.element_view(s.fields.u, 0);
  for (int n = 0; n < disc.nodes_per_element(); ++n) {
    const Eigen::Vector2d x = disc.node_position(0, n);
    v(n, 0) = std::cos(0.5 * std::numbers::pi * (x.x() + 1.0));
  }
  const double e0 = discrete_energy(disc, s.fields);
  auto rhs = [&](const Fields& f) { return disc.rhs(f); };
  const double dt = 0.2 * timestep(c, mesh);
  for (int step = 0; step < 200; ++step) s = advance(s, dt, rhs);
  const double e1 = discrete_energy(disc, s.fields);
  CHECK(std::abs(e1 - e0) / e0 < 1e-6);
}

TEST_CASE("RK4 integrates u' = -u to fourth order") {
  SimState s;
  s.fields.u = Eigen::VectorXd::Ones(1);
  auto rhs = [](const Fields& f) {
    Fields out = f;
    out *= -1.0;
    return out;
  };
  const double dt = 0.01;
  for (int i = 0; i < 100; ++i) s = advance(s, dt, rhs);
  CHECK(s.t == doctest::Approx(1.0));
  CHECK(std::abs(s.fields.u(0) - std::exp(-1.0)) < 1e-9);

  SimState z;
  z.fields.u = Eigen::VectorXd::Zero(3);
  auto zero = [](const Fields& f) {
    Fields out = f;
    out.set_zero();
    return out;
  };
  z.fields.u << 1.0, 2.0, 3.0;
  const SimState n = advance(z, 0.5, zero);
  CHECK(n.fields.u == z.fields.u);

  auto blow = [](const Fields& f) {
    Fields out = f;
    out.u.setConstant(std::numeric_limits<double>::infinity());
    return out;
  };
  CHECK_THROWS_AS(advance(z, 0.1, blow), UnstableRun);
}

TEST_CASE("rhs is independent of the thread count") {
  const Mesh mesh = Mesh::uniform(-50.0, 60.0, 0.0, 50.0, 5.0, medium_preset("am1-table1"));
  SolverConfig c;
  c.degree = 3;
  const auto prof = east_profile(50.0, 10.0, 8.0);
  ::setenv("WAVELAB_THREADS", "1", 1);
  const Discretization serial(mesh, c, {prof});
  ::setenv("WAVELAB_THREADS", "4", 1);
  const Discretization parallel(mesh, c, {prof});
  ::unsetenv("WAVELAB_THREADS");
  const Fields f = random_fields(serial, 23);
  CHECK(max_abs_diff(serial.rhs(f), parallel.rhs(f)) == 0.0);
}
