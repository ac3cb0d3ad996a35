#include "wavelab/solver.hpp"

#include "wavelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace wavelab {

// ---------------------------------------------------------------------------
// Hat states

AcousticHat hat_states_acoustic(double p_left, double vn_left, double z_left, double p_right,
                                double vn_right, double z_right) {
  // p + Z_L v preserved on the left, p - Z_R v on the right.
  const double v = (z_left * vn_left + z_right * vn_right + p_left - p_right) / (z_left + z_right);
  return {p_left + z_left * (vn_left - v), v};
}

ElasticHat hat_states_elastic(const Eigen::Vector2d& t_left, const Eigen::Vector2d& v_left,
                              const Eigen::Vector2d& z_left, const Eigen::Vector2d& t_right,
                              const Eigen::Vector2d& v_right, const Eigen::Vector2d& z_right) {
  // T - Z_L v preserved on the left, T + Z_R v on the right.
  ElasticHat hat;
  for (int c = 0; c < 2; ++c) {
    const double v = (z_left(c) * v_left(c) + z_right(c) * v_right(c) + t_right(c) - t_left(c)) /
                     (z_left(c) + z_right(c));
    hat.velocity(c) = v;
    hat.traction(c) = t_left(c) + z_left(c) * (v - v_left(c));
  }
  return hat;
}

double boundary_fluctuation_acoustic(double p, double vn, double z, double r, int sign) {
  return 0.5 * (1.0 - r) * z * vn - sign * 0.5 * (1.0 + r) * p;
}

Eigen::Vector2d boundary_fluctuation_elastic(const Eigen::Vector2d& traction,
                                             const Eigen::Vector2d& velocity,
                                             const Eigen::Vector2d& z, double r, int sign) {
  return 0.5 * (1.0 - r) * z.cwiseProduct(velocity) + sign * 0.5 * (1.0 + r) * traction;
}

// ---------------------------------------------------------------------------
// Mesh

Mesh::Mesh(std::vector<double> x_breaks, std::vector<double> y_breaks, std::vector<Medium> media,
           std::vector<int> element_medium)
    : x_breaks_(std::move(x_breaks)),
      y_breaks_(std::move(y_breaks)),
      media_(std::move(media)),
      element_medium_(std::move(element_medium)) {
  if (x_breaks_.size() < 2 || y_breaks_.size() < 2)
    throw ContractViolation("Mesh: need at least one element per direction");
  for (const auto* b : {&x_breaks_, &y_breaks_})
    for (std::size_t i = 1; i < b->size(); ++i)
      if (!((*b)[i] > (*b)[i - 1])) throw ContractViolation("Mesh: breaks must increase");
  if (media_.empty()) throw ContractViolation("Mesh: no media");
  for (const auto& m : media_)
    if (m.physics() != media_.front().physics())
      throw ContractViolation("Mesh: media must share one physics");
  if (static_cast<int>(element_medium_.size()) != element_count())
    throw ContractViolation("Mesh: element medium map has the wrong size");
  for (int id : element_medium_)
    if (id < 0 || id >= static_cast<int>(media_.size()))
      throw ContractViolation("Mesh: medium index out of range");
}

Mesh Mesh::uniform(double x0, double x1, double y0, double y1, double h, const Medium& medium) {
  auto breaks = [h](double a, double b, const char* name) {
    const double count = (b - a) / h;
    const long n = std::lround(count);
    if (n < 1 || std::abs(count - static_cast<double>(n)) > 1e-9 * std::max(1.0, count))
      throw ContractViolation(std::string("Mesh::uniform: element size does not divide the ") +
                              name + " extent");
    std::vector<double> out(n + 1);
    for (long i = 0; i <= n; ++i) out[i] = a + static_cast<double>(i) * h;
    out[n] = b;
    return out;
  };
  auto xb = breaks(x0, x1, "x");
  auto yb = breaks(y0, y1, "y");
  const int count = static_cast<int>((xb.size() - 1) * (yb.size() - 1));
  return Mesh(std::move(xb), std::move(yb), {medium}, std::vector<int>(count, 0));
}

AffineMap Mesh::map(int e) const {
  const int k = column(e);
  const int l = row(e);
  return {x_breaks_[k], x_breaks_[k + 1], y_breaks_[l], y_breaks_[l + 1]};
}

std::optional<int> Mesh::neighbor(int e, Face f) const {
  const int k = column(e);
  const int l = row(e);
  switch (f) {
    case Face::west: return k > 0 ? std::optional<int>(element(k - 1, l)) : std::nullopt;
    case Face::east: return k + 1 < nx() ? std::optional<int>(element(k + 1, l)) : std::nullopt;
    case Face::south: return l > 0 ? std::optional<int>(element(k, l - 1)) : std::nullopt;
    case Face::north: return l + 1 < ny() ? std::optional<int>(element(k, l + 1)) : std::nullopt;
  }
  return std::nullopt;
}

std::optional<int> Mesh::locate(double x, double y) const {
  auto find = [](const std::vector<double>& b, double v) -> std::optional<int> {
    const double tol = 1e-12 * std::max(1.0, b.back() - b.front());
    if (v < b.front() - tol || v > b.back() + tol) return std::nullopt;
    const auto it = std::lower_bound(b.begin(), b.end(), v);
    const int idx = static_cast<int>(it - b.begin());
    return std::clamp(idx - 1, 0, static_cast<int>(b.size()) - 2);
  };
  const auto k = find(x_breaks_, x);
  const auto l = find(y_breaks_, y);
  if (!k || !l) return std::nullopt;
  return element(*k, *l);
}

void validate(const SolverConfig& c) {
  if (c.degree < 1 || c.degree > kMaxDegree)
    throw std::invalid_argument("solver: degree must be in [1, 12]");
  if (!(c.theta_x >= 0.0 && c.theta_x <= 1.0) || !(c.theta_y >= 0.0 && c.theta_y <= 1.0))
    throw std::invalid_argument("solver: theta must lie in [0, 1]");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw std::invalid_argument("solver: CFL must lie in (0, 1]");
  for (double r : c.boundary.r)
    if (!(std::abs(r) <= 1.0))
      throw std::invalid_argument("solver: reflection coefficients must satisfy |r| <= 1");
}

// ---------------------------------------------------------------------------
// Fields

Fields& Fields::operator+=(const Fields& o) { return add_scaled(1.0, o); }

Fields& Fields::operator*=(double a) {
  u *= a;
  wx *= a;
  wy *= a;
  return *this;
}

Fields& Fields::add_scaled(double a, const Fields& o) {
  u += a * o.u;
  wx += a * o.wx;
  wy += a * o.wy;
  return *this;
}

void Fields::set_zero() {
  u.setZero();
  wx.setZero();
  wy.setZero();
}

bool Fields::all_finite() const { return u.allFinite() && wx.allFinite() && wy.allFinite(); }

// ---------------------------------------------------------------------------
// Discretization

namespace {

int thread_count_from_env() {
  if (const char* env = std::getenv("WAVELAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// Global node index of the k-th node along face f.
int face_node(Face f, int k, int n1) {
  switch (f) {
    case Face::west: return k * n1;
    case Face::east: return (n1 - 1) + k * n1;
    case Face::south: return k;
    case Face::north: return k + (n1 - 1) * n1;
  }
  return 0;
}

Face opposite(Face f) {
  switch (f) {
    case Face::west: return Face::east;
    case Face::east: return Face::west;
    case Face::south: return Face::north;
    case Face::north: return Face::south;
  }
  return f;
}

constexpr std::array<Face, 4> kFaces{Face::west, Face::east, Face::south, Face::north};

// Stress slots (in U) of the traction components (T_x, T_y) on a face
// normal to `axis`.
std::array<int, 2> traction_slots(Axis axis) {
  return axis == Axis::x ? std::array<int, 2>{2, 4} : std::array<int, 2>{4, 3};
}

Eigen::Vector2d component_impedances(const Impedances& z, Axis axis) {
  const double t = z.tangential.value_or(z.normal);
  return axis == Axis::x ? Eigen::Vector2d(z.normal, t) : Eigen::Vector2d(t, z.normal);
}

}  // namespace

Discretization::Discretization(Mesh mesh, SolverConfig config, std::vector<PmlProfile> profiles)
    : mesh_(std::move(mesh)),
      config_(config),
      profiles_(std::move(profiles)),
      ref_(build_reference_element<double>(config.degree)),
      m_(mesh_.field_count()),
      threads_(thread_count_from_env()) {
  validate(config_);
  for (const auto& p : profiles_) validate(p);

  for (const auto& medium : mesh_.media()) {
    coeffs_.push_back(coefficient_matrices(medium));
    p_inverse_.push_back(coeffs_.back().P.inverse());
    impedance_.push_back({impedances(medium, Axis::x), impedances(medium, Axis::y)});
  }

  const int ne = mesh_.element_count();
  const int np = nodes_per_element();
  const int n1 = nodes_1d();
  elements_.resize(ne);
  for (auto& slots : aux_slot_) slots.assign(ne, -1);

  for (int e = 0; e < ne; ++e) {
    ElementData& el = elements_[e];
    el.map = mesh_.map(e);
    for (int a = 0; a < 2; ++a) {
      const Axis axis = static_cast<Axis>(a);
      Eigen::VectorXd d = Eigen::VectorXd::Zero(np);
      Eigen::VectorXd alpha = Eigen::VectorXd::Zero(np);
      for (const auto& p : profiles_) {
        if (p.axis != axis) continue;
        bool touches = false;
        for (int j = 0; j < n1; ++j)
          for (int i = 0; i < n1; ++i) {
            const double xi = a == 0 ? el.map.x(ref_.nodes(i)) : el.map.y(ref_.nodes(j));
            const double value = damping_at(p, xi);
            d(i + n1 * j) += value;
            if (value > 0.0) touches = true;
          }
        if (touches) {
          alpha.setConstant(p.cfs_alpha);
          el.gamma[a] = p.gamma;
        }
      }
      if (d.maxCoeff() > 0.0) {
        el.damping[a] = std::move(d);
        el.alpha[a] = std::move(alpha);
        aux_slot_[a][e] = aux_count_[a]++;
      }
    }
  }
}

Eigen::VectorXd Discretization::damping_nodes(int e, Axis axis) const {
  const auto& d = elements_[e].damping[static_cast<int>(axis)];
  return d.size() ? d : Eigen::VectorXd::Zero(nodes_per_element());
}

Eigen::Vector2d Discretization::node_position(int e, int n) const {
  const int n1 = nodes_1d();
  const auto& map = elements_[e].map;
  return {map.x(ref_.nodes(n % n1)), map.y(ref_.nodes(n / n1))};
}

SimState Discretization::zero_state() const {
  SimState s;
  s.fields.u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh_.element_count()) * element_block());
  s.fields.wx = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(aux_count_[0]) * element_block());
  s.fields.wy = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(aux_count_[1]) * element_block());
  return s;
}

Eigen::Map<const Eigen::MatrixXd> Discretization::element_view(const Eigen::VectorXd& u, int e) const {
  return {u.data() + static_cast<Eigen::Index>(e) * element_block(), nodes_per_element(), m_};
}

Eigen::Map<Eigen::MatrixXd> Discretization::element_view(Eigen::VectorXd& u, int e) const {
  return {u.data() + static_cast<Eigen::Index>(e) * element_block(), nodes_per_element(), m_};
}

double Discretization::max_wave_speed() const {
  double c = 0.0;
  for (const auto& m : mesh_.media()) c = std::max(c, wave_speeds(m).cp);
  return c;
}

void Discretization::add_face_term(int e, Face f, const Eigen::VectorXd& u,
                                   Eigen::MatrixXd& surface) const {
  const int n1 = nodes_1d();
  const Axis axis = face_axis(f);
  const int a = static_cast<int>(axis);
  const int sign = face_sign(f);
  const auto own = element_view(u, e);
  const auto nbr_id = mesh_.neighbor(e, f);
  const Eigen::MatrixXd& amat = coeffs_[mesh_.medium_index(e)].A(axis);
  const double lift = elements_[e].map.metric(axis) /
                      (sign > 0 ? ref_.weights(n1 - 1) : ref_.weights(0));
  const Impedances& z_own = impedance_[mesh_.medium_index(e)][a];
  const double r = config_.boundary.at(f);

  std::optional<Eigen::Map<const Eigen::MatrixXd>> nbr;
  const Impedances* z_nbr = nullptr;
  if (nbr_id) {
    nbr.emplace(element_view(u, *nbr_id));
    z_nbr = &impedance_[mesh_.medium_index(*nbr_id)][a];
  }
  const Face nbr_face = opposite(f);

  Eigen::VectorXd diff(m_);
  for (int k = 0; k < n1; ++k) {
    const int node = face_node(f, k, n1);
    diff.setZero();
    if (mesh_.physics() == Physics::acoustic) {
      const int vi = 1 + a;
      const double p = own(node, 0);
      const double v = own(node, vi);
      const double z = z_own.normal;
      if (nbr) {
        const int nn = face_node(nbr_face, k, n1);
        const double pn = (*nbr)(nn, 0);
        const double vn = (*nbr)(nn, vi);
        const AcousticHat hat = sign > 0 ? hat_states_acoustic(p, v, z, pn, vn, z_nbr->normal)
                                         : hat_states_acoustic(pn, vn, z_nbr->normal, p, v, z);
        diff(0) = p - hat.p;
        diff(vi) = v - hat.vn;
      } else {
        const double g = boundary_fluctuation_acoustic(p, v, z, r, sign);
        diff(0) = -sign * g;
        diff(vi) = g / z;
      }
    } else {
      const auto slots = traction_slots(axis);
      const Eigen::Vector2d t(own(node, slots[0]), own(node, slots[1]));
      const Eigen::Vector2d v(own(node, 0), own(node, 1));
      const Eigen::Vector2d z = component_impedances(z_own, axis);
      Eigen::Vector2d dv, dt;
      if (nbr) {
        const int nn = face_node(nbr_face, k, n1);
        const Eigen::Vector2d tn((*nbr)(nn, slots[0]), (*nbr)(nn, slots[1]));
        const Eigen::Vector2d vn((*nbr)(nn, 0), (*nbr)(nn, 1));
        const Eigen::Vector2d zn = component_impedances(*z_nbr, axis);
        const ElasticHat hat = sign > 0 ? hat_states_elastic(t, v, z, tn, vn, zn)
                                        : hat_states_elastic(tn, vn, zn, t, v, z);
        dv = v - hat.velocity;
        dt = t - hat.traction;
      } else {
        const Eigen::Vector2d g = boundary_fluctuation_elastic(t, v, z, r, sign);
        dv = g.cwiseQuotient(z);
        dt = sign * g;
      }
      diff(0) = dv(0);
      diff(1) = dv(1);
      diff(slots[0]) = dt(0);
      diff(slots[1]) = dt(1);
    }
    // FR = A (U - U^hat) on the high face, FL = -A (U - U^hat) on the low face.
    surface.row(node).noalias() -= (lift * sign) * (amat * diff).transpose();
  }
}

void Discretization::element_rhs(int e, const Fields& s, Fields& out) const {
  const int n1 = nodes_1d();
  const int np = nodes_per_element();
  const ElementData& el = elements_[e];
  const CoefficientMatrices& cm = coeffs_[mesh_.medium_index(e)];
  const auto u = element_view(s.u, e);

  // Volume terms: derivative along x acts on the fast node index.
  Eigen::MatrixXd dxu(np, m_), dyu(np, m_);
  {
    const Eigen::Map<const Eigen::MatrixXd> stacked(u.data(), n1, n1 * m_);
    Eigen::Map<Eigen::MatrixXd>(dxu.data(), n1, n1 * m_).noalias() = el.map.qx() * ref_.D * stacked;
    for (int f = 0; f < m_; ++f) {
      const Eigen::Map<const Eigen::MatrixXd> field(u.col(f).data(), n1, n1);
      Eigen::Map<Eigen::MatrixXd>(dyu.col(f).data(), n1, n1).noalias() =
          el.map.ry() * field * ref_.D.transpose();
    }
  }
  const Eigen::MatrixXd vx = (dxu * cm.Ax) / el.gamma[0];
  const Eigen::MatrixXd vy = (dyu * cm.Ay) / el.gamma[1];

  Eigen::MatrixXd sx = Eigen::MatrixXd::Zero(np, m_);
  Eigen::MatrixXd sy = Eigen::MatrixXd::Zero(np, m_);
  add_face_term(e, Face::west, s.u, sx);
  add_face_term(e, Face::east, s.u, sx);
  add_face_term(e, Face::south, s.u, sy);
  add_face_term(e, Face::north, s.u, sy);

  Eigen::MatrixXd total = vx + vy + sx + sy;
  const std::array<const Eigen::VectorXd*, 2> w_all{&s.wx, &s.wy};
  const std::array<Eigen::VectorXd*, 2> dw_all{&out.wx, &out.wy};
  const std::array<const Eigen::MatrixXd*, 2> volume{&vx, &vy};
  const std::array<const Eigen::MatrixXd*, 2> surface{&sx, &sy};
  for (int a = 0; a < 2; ++a) {
    const int slot = aux_slot_[a][e];
    if (slot < 0) continue;
    const Eigen::Map<const Eigen::MatrixXd> w(w_all[a]->data() + static_cast<Eigen::Index>(slot) * element_block(), np, m_);
    Eigen::Map<Eigen::MatrixXd> dw(dw_all[a]->data() + static_cast<Eigen::Index>(slot) * element_block(), np, m_);
    total.noalias() -= el.damping[a].asDiagonal() * w;
    dw = *volume[a] - (el.damping[a] + el.alpha[a]).asDiagonal() * w +
         config_.theta(static_cast<Axis>(a)) * *surface[a];
  }
  element_view(out.u, e).noalias() = total * cm.P;
}

Fields Discretization::rhs(const Fields& state) const {
  Fields out;
  out.u.resize(state.u.size());
  out.wx.resize(state.wx.size());
  out.wy.resize(state.wy.size());
  const int ne = mesh_.element_count();
  if (threads_ <= 1 || ne < 2 * threads_) {
    for (int e = 0; e < ne; ++e) element_rhs(e, state, out);
    return out;
  }
  // Element-local writes only; the partition does not affect the result.
  std::vector<std::jthread> pool;
  const int chunk = (ne + threads_ - 1) / threads_;
  for (int t = 0; t < threads_; ++t) {
    const int begin = t * chunk;
    const int end = std::min(ne, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([this, begin, end, &state, &out] {
      for (int e = begin; e < end; ++e) element_rhs(e, state, out);
    });
  }
  return out;
}

double timestep(const SolverConfig& config, const Mesh& mesh) {
  if (!(config.cfl > 0.0 && config.cfl <= 1.0))
    throw std::invalid_argument("timestep: CFL must lie in (0, 1]");
  double cp = 0.0;
  for (const auto& m : mesh.media()) cp = std::max(cp, wave_speeds(m).cp);
  double hmin = std::numeric_limits<double>::infinity();
  for (const auto* b : {&mesh.x_breaks(), &mesh.y_breaks()})
    for (std::size_t i = 1; i < b->size(); ++i) hmin = std::min(hmin, (*b)[i] - (*b)[i - 1]);
  return config.cfl / (std::sqrt(2.0) * (2 * config.degree + 1) * cp) * hmin;
}

}  // namespace wavelab
