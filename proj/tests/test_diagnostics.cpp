#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "wavelab/diagnostics.hpp"
#include "wavelab/errors.hpp"
#include "wavelab/run.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace wavelab;

namespace {

Discretization unit_box(int degree) {
  SolverConfig c;
  c.degree = degree;
  return Discretization(Mesh::uniform(-1.0, 1.0, -1.0, 1.0, 2.0, Medium::acoustic(1.0, 1.0)), c);
}

Discretization waveguide(const char* medium, int degree) {
  SolverConfig c;
  c.degree = degree;
  return Discretization(Mesh::uniform(-50.0, 60.0, 0.0, 50.0, 5.0, medium_preset(medium)), c);
}

template <typename F>
Fields fill(const Discretization& disc, int field, F f) {
  Fields out = disc.zero_state().fields;
  for (int e = 0; e < disc.mesh().element_count(); ++e) {
    auto v = disc.element_view(out.u, e);
    for (int n = 0; n < disc.nodes_per_element(); ++n) {
      const Eigen::Vector2d x = disc.node_position(e, n);
      v(n, field) = f(x.x(), x.y());
    }
  }
  return out;
}

}  // namespace

TEST_CASE("pairwise sum") {
  CHECK(pairwise_sum({}) == 0.0);
  CHECK(pairwise_sum({1.5}) == 1.5);
  std::vector<double> v(1000);
  for (int i = 0; i < 1000; ++i) v[i] = i + 1;
  CHECK(pairwise_sum(v) == 500500.0);
}

TEST_CASE("energy of simple states") {
  const Discretization disc = unit_box(4);
  CHECK(discrete_energy(disc, disc.zero_state().fields) == 0.0);

  const Fields one = fill(disc, 0, [](double, double) { return 1.0; });
  CHECK(discrete_energy(disc, one) == doctest::Approx(2.0).epsilon(1e-14));
  Fields three = one;
  three *= 3.0;
  CHECK(discrete_energy(disc, three) == doctest::Approx(18.0).epsilon(1e-14));

  // Velocity energy uses rho; p energy uses 1/kappa.
  SolverConfig c;
  c.degree = 3;
  const Discretization heavy(Mesh::uniform(-1.0, 1.0, -1.0, 1.0, 2.0, Medium::acoustic(2.0, 4.0)), c);
  const Fields vx = fill(heavy, 1, [](double, double) { return 1.0; });
  CHECK(discrete_energy(heavy, vx) == doctest::Approx(4.0).epsilon(1e-14));
  const Fields p = fill(heavy, 0, [](double, double) { return 1.0; });
  CHECK(discrete_energy(heavy, p) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("energy is bitwise reproducible across disc instances") {
  const Discretization a = waveguide("am1-table1", 3);
  const Discretization b = waveguide("am1-table1", 3);
  std::mt19937 gen(4);
  std::normal_distribution<double> normal;
  Fields f = a.zero_state().fields;
  for (Eigen::Index i = 0; i < f.u.size(); ++i) f.u(i) = normal(gen);
  CHECK(discrete_energy(a, f) == discrete_energy(b, f));
  CHECK(discrete_energy(a, f) > 0.0);
}

TEST_CASE("L-infinity norm") {
  const Discretization disc = waveguide("acoustic-484", 4);
  SimState s = disc.zero_state();
  PulseSpec pulse;
  pulse.x0 = 0.0;
  initialize_pulse(disc, pulse, 25.0, s);
  CHECK(linf_norm(disc, s.fields, FieldSelector::pressure()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(linf_norm(disc, s.fields, FieldSelector::velocity()) == 0.0);

  Fields f = disc.zero_state().fields;
  f.u(17) = -5.0;
  CHECK(linf_norm(disc, f, FieldSelector::component(0)) == 5.0);

  const Box far{30.0, 60.0, 0.0, 50.0};
  CHECK(linf_norm(disc, s.fields, FieldSelector::pressure(), far) < 1e-10);

  f.u(3) = std::numeric_limits<double>::quiet_NaN();
  CHECK(std::isnan(linf_norm(disc, f, FieldSelector::pressure())));
}

TEST_CASE("elastic particle speed and selector contract") {
  const Discretization disc = waveguide("iso-table1", 2);
  Fields f = disc.zero_state().fields;
  auto v = disc.element_view(f.u, 5);
  v(0, 0) = 3.0;
  v(0, 1) = 4.0;
  CHECK(linf_norm(disc, f, FieldSelector::velocity()) == doctest::Approx(5.0));
  CHECK(linf_norm(disc, f, FieldSelector::natural(Physics::elastic)) == doctest::Approx(5.0));
  CHECK_THROWS_AS(linf_norm(disc, f, FieldSelector::pressure()), ContractViolation);
  CHECK(selector_columns(FieldSelector::velocity(), Physics::acoustic) == std::vector<int>{1, 2});
}

TEST_CASE("receiver interpolation") {
  const Discretization disc = waveguide("acoustic-484", 4);
  const Fields lin = fill(disc, 0, [](double x, double y) { return 0.3 * x - 0.7 * y + 2.0; });
  for (auto [x, y] : {std::pair{0.0, 25.0}, {40.0, 25.0}, {55.0, 25.0}, {-12.34, 7.89}, {60.0, 50.0}}) {
    const Eigen::VectorXd r = receiver_sample(disc, lin, x, y);
    CHECK(std::abs(r(0) - (0.3 * x - 0.7 * y + 2.0)) < 1e-13 * 50.0);
  }

  const Fields konst = fill(disc, 2, [](double, double) { return -4.0; });
  CHECK(receiver_sample(disc, konst, 13.0, 41.0)(2) == doctest::Approx(-4.0).epsilon(1e-14));

  // At a node the sample equals the stored value.
  std::mt19937 gen(8);
  std::normal_distribution<double> normal;
  Fields rnd = disc.zero_state().fields;
  for (Eigen::Index i = 0; i < rnd.u.size(); ++i) rnd.u(i) = normal(gen);
  const int e = 37, n = 7;
  const Eigen::Vector2d x = disc.node_position(e, n);
  const Eigen::VectorXd s = receiver_sample(disc, rnd, x.x(), x.y());
  const auto view = disc.element_view(rnd.u, e);
  CHECK((s.transpose() - view.row(n)).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(receiver_sample(disc, rnd, 61.0, 25.0), std::invalid_argument);
  CHECK_THROWS_AS(receiver_sample(disc, rnd, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("energy series increase") {
  EnergySeries e;
  e.times = {0, 1, 2, 3};
  e.values = {4.0, 3.0, 3.3, 2.0};
  CHECK(e.max_relative_increase() == doctest::Approx(0.1));
  e.values = {4.0, 3.0, 2.0, 1.0};
  CHECK(e.max_relative_increase() == 0.0);
}

TEST_CASE("window records and the error against a reference") {
  const Discretization disc = waveguide("acoustic-484", 3);
  const Box box{-50.0, 50.0, 0.0, 50.0};
  WindowRecord a = make_window(disc, box, FieldSelector::pressure());
  CHECK(a.channels == 1);
  CHECK(a.positions.size() == static_cast<std::size_t>(20 * 10 * 16));
  CHECK(a.weights.sum() == doctest::Approx(100.0 * 50.0).epsilon(1e-12));

  SimState s = disc.zero_state();
  PulseSpec pulse;
  initialize_pulse(disc, pulse, 25.0, s);
  record_window(a, disc, s.fields, FieldSelector::pressure(), 0.0);
  record_window(a, disc, s.fields, FieldSelector::pressure(), 1.0);
  WindowRecord b = a;

  const ErrorSeries self = pml_error(a, b, 10.0);
  REQUIRE(self.times.size() == 2);
  CHECK(self.max_linf() == 0.0);
  CHECK(self.l2[1] == 0.0);

  // Shift by a constant: L-inf is the shift, L2 is shift * sqrt(area).
  for (auto& smp : b.samples) smp.array() += 0.5;
  const ErrorSeries shifted = pml_error(a, b, 10.0);
  CHECK(shifted.max_linf() == doctest::Approx(0.5));
  CHECK(shifted.l2[0] == doctest::Approx(0.5 * std::sqrt(5000.0)).epsilon(1e-12));
  CHECK(pml_error(a, b, 0.5).times.size() == 1);

  WindowRecord other = make_window(disc, Box{-50.0, 40.0, 0.0, 50.0}, FieldSelector::pressure());
  CHECK_THROWS_AS(pml_error(a, other, 10.0), ContractViolation);
  WindowRecord vel = make_window(disc, box, FieldSelector::velocity());
  CHECK(vel.channels == 2);
  CHECK_THROWS_AS(pml_error(a, vel, 10.0), ContractViolation);
}

TEST_CASE("validity horizon") {
  CHECK(validity_horizon(100.0, 1.484, 5.0) == doctest::Approx(195.0 / 1.484));
  CHECK(validity_horizon(100.0, 1.484, 5.0) == doctest::Approx(131.4).epsilon(1e-3));
}
