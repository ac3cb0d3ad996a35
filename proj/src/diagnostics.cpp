#include "wavelab/diagnostics.hpp"

#include "wavelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavelab {

namespace {

double pairwise_range(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_range(v, half) + pairwise_range(v + half, n - half);
}

bool element_inside(const AffineMap& map, const Box& box) {
  return box.contains(map.x0, map.y0) && box.contains(map.x1, map.y1);
}

}  // namespace

std::vector<int> selector_columns(FieldSelector sel, Physics physics) {
  switch (sel.kind) {
    case FieldSelector::Kind::pressure:
      if (physics != Physics::acoustic)
        throw ContractViolation("field selector: pressure is only defined for acoustics");
      return {0};
    case FieldSelector::Kind::velocity_magnitude:
      return physics == Physics::acoustic ? std::vector<int>{1, 2} : std::vector<int>{0, 1};
    case FieldSelector::Kind::component: {
      const int m = physics == Physics::acoustic ? 3 : 5;
      if (sel.index < 0 || sel.index >= m)
        throw ContractViolation("field selector: component index out of range");
      return {sel.index};
    }
  }
  return {};
}

double pairwise_sum(const std::vector<double>& values) {
  return pairwise_range(values.data(), values.size());
}

double discrete_energy(const Discretization& disc, const Fields& fields) {
  const auto& ref = disc.reference();
  const int n1 = disc.nodes_1d();
  Eigen::VectorXd h2(disc.nodes_per_element());
  for (int j = 0; j < n1; ++j)
    for (int i = 0; i < n1; ++i) h2(i + n1 * j) = ref.weights(i) * ref.weights(j);

  const int ne = disc.mesh().element_count();
  std::vector<double> partial(ne);
  for (int e = 0; e < ne; ++e) {
    const auto u = disc.element_view(fields.u, e);
    const Eigen::MatrixXd weighted = u * disc.inverse_material(e);
    const double quad = h2.dot(u.cwiseProduct(weighted).rowwise().sum());
    partial[e] = 0.5 * disc.mesh().map(e).jacobian() * quad;
  }
  return pairwise_sum(partial);
}

double linf_norm(const Discretization& disc, const Fields& fields, FieldSelector sel,
                 const std::optional<Box>& window) {
  const auto cols = selector_columns(sel, disc.mesh().physics());
  double out = 0.0;
  for (int e = 0; e < disc.mesh().element_count(); ++e) {
    const auto u = disc.element_view(fields.u, e);
    for (int n = 0; n < disc.nodes_per_element(); ++n) {
      if (window) {
        const Eigen::Vector2d x = disc.node_position(e, n);
        if (!window->contains(x.x(), x.y())) continue;
      }
      double v;
      if (cols.size() == 1) {
        v = std::abs(u(n, cols[0]));
      } else {
        v = std::hypot(u(n, cols[0]), u(n, cols[1]));
      }
      // NaN must propagate so callers see the blow-up.
      if (std::isnan(v)) return v;
      out = std::max(out, v);
    }
  }
  return out;
}

Eigen::VectorXd receiver_sample(const Discretization& disc, const Fields& fields, double x,
                                double y) {
  const auto e = disc.mesh().locate(x, y);
  if (!e) throw std::invalid_argument("receiver_sample: location outside the mesh");
  const AffineMap map = disc.mesh().map(*e);
  const auto& nodes = disc.reference().nodes;
  const Eigen::VectorXd lx = lagrange_basis<double>(nodes, std::clamp(map.q(x), -1.0, 1.0));
  const Eigen::VectorXd ly = lagrange_basis<double>(nodes, std::clamp(map.r(y), -1.0, 1.0));
  const int n1 = disc.nodes_1d();
  Eigen::VectorXd tensor(disc.nodes_per_element());
  for (int j = 0; j < n1; ++j)
    for (int i = 0; i < n1; ++i) tensor(i + n1 * j) = lx(i) * ly(j);
  return disc.element_view(fields.u, *e).transpose() * tensor;
}

double EnergySeries::max_relative_increase() const {
  double worst = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i - 1] <= 0.0) continue;
    worst = std::max(worst, (values[i] - values[i - 1]) / values[i - 1]);
  }
  return worst;
}

WindowRecord make_window(const Discretization& disc, const Box& box, FieldSelector sel) {
  WindowRecord rec;
  rec.box = box;
  rec.degree = disc.degree();
  rec.channels = static_cast<int>(selector_columns(sel, disc.mesh().physics()).size());
  const auto& w = disc.reference().weights;
  const int n1 = disc.nodes_1d();
  std::vector<double> weights;
  for (int e = 0; e < disc.mesh().element_count(); ++e) {
    const AffineMap map = disc.mesh().map(e);
    if (!element_inside(map, box)) continue;
    for (int n = 0; n < disc.nodes_per_element(); ++n) {
      rec.positions.push_back(disc.node_position(e, n));
      weights.push_back(map.jacobian() * w(n % n1) * w(n / n1));
    }
  }
  rec.weights = Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  return rec;
}

void record_window(WindowRecord& rec, const Discretization& disc, const Fields& fields,
                   FieldSelector sel, double t) {
  const auto cols = selector_columns(sel, disc.mesh().physics());
  Eigen::VectorXd sample(static_cast<Eigen::Index>(rec.positions.size()) * rec.channels);
  Eigen::Index k = 0;
  for (int e = 0; e < disc.mesh().element_count(); ++e) {
    if (!element_inside(disc.mesh().map(e), rec.box)) continue;
    const auto u = disc.element_view(fields.u, e);
    for (int n = 0; n < disc.nodes_per_element(); ++n)
      for (int c : cols) sample(k++) = u(n, c);
  }
  if (k != sample.size()) throw ContractViolation("record_window: window does not match the mesh");
  rec.times.push_back(t);
  rec.samples.push_back(std::move(sample));
}

double ErrorSeries::max_linf() const {
  double m = 0.0;
  for (double v : linf) m = std::max(m, v);
  return m;
}

ErrorSeries pml_error(const WindowRecord& run, const WindowRecord& ref, double horizon) {
  if (run.degree != ref.degree || run.channels != ref.channels ||
      run.positions.size() != ref.positions.size())
    throw ContractViolation("pml_error: runs use different discretizations of the window");
  for (std::size_t i = 0; i < run.positions.size(); ++i)
    if ((run.positions[i] - ref.positions[i]).cwiseAbs().maxCoeff() > 1e-9)
      throw ContractViolation("pml_error: window node positions differ");

  ErrorSeries out;
  const int c = run.channels;
  std::size_t j = 0;
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const double t = run.times[i];
    if (t > horizon) break;
    while (j < ref.times.size() && ref.times[j] < t - 1e-9 * std::max(1.0, t)) ++j;
    if (j == ref.times.size()) break;
    if (std::abs(ref.times[j] - t) > 1e-9 * std::max(1.0, t))
      throw ContractViolation("pml_error: runs were recorded at different times");
    const Eigen::VectorXd diff = run.samples[i] - ref.samples[j];
    const Eigen::Map<const Eigen::MatrixXd> d(diff.data(), c, diff.size() / c);
    const Eigen::VectorXd pointwise = d.colwise().norm().transpose();
    out.times.push_back(t);
    out.linf.push_back(pointwise.size() ? pointwise.maxCoeff() : 0.0);
    out.l2.push_back(std::sqrt(run.weights.dot(pointwise.cwiseAbs2())));
  }
  return out;
}

double validity_horizon(double distance, double cp_max, double element_size) {
  if (!(cp_max > 0.0)) throw std::invalid_argument("validity_horizon: c_p must be > 0");
  return (2.0 * distance - element_size) / cp_max;
}

}  // namespace wavelab
