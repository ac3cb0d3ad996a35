#include "wavelab/run.hpp"

#include "wavelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace wavelab {

using nlohmann::json;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

double RunRecord::max_linf() const {
  double m = 0.0;
  for (const auto& row : series) m = std::max(m, row.linf);
  return m;
}

std::pair<long, double> step_plan(double final_time, double dt_max) {
  if (!(final_time > 0.0) || !(dt_max > 0.0))
    throw std::invalid_argument("step_plan: need positive final time and step");
  const long steps = static_cast<long>(std::ceil(final_time / dt_max - 1e-12));
  return {std::max(1L, steps), final_time / static_cast<double>(std::max(1L, steps))};
}

void initialize_pulse(const Discretization& disc, const PulseSpec& pulse, double y_mid,
                      SimState& state) {
  const double yc = pulse.y0.value_or(y_mid);
  const bool acoustic = disc.mesh().physics() == Physics::acoustic;
  state.fields.set_zero();
  for (int e = 0; e < disc.mesh().element_count(); ++e) {
    auto u = disc.element_view(state.fields.u, e);
    for (int n = 0; n < disc.nodes_per_element(); ++n) {
      const Eigen::Vector2d x = disc.node_position(e, n);
      const double r2 = (x.x() - pulse.x0) * (x.x() - pulse.x0) + (x.y() - yc) * (x.y() - yc);
      const double f = pulse.amplitude * std::exp(-std::numbers::ln2 * r2 / pulse.width);
      if (acoustic) {
        u(n, 0) = f;
      } else {
        u(n, 0) = f;
        u(n, 1) = f;
      }
    }
  }
}

RunRecord run(const Scenario& s, const RunOptions& options) {
  validate(s);
  const Discretization disc(build_mesh(s), build_solver_config(s), build_pml_profiles(s));
  const auto [steps, dt] = step_plan(s.final_time, timestep(disc.config(), disc.mesh()));
  const FieldSelector sel = FieldSelector::natural(disc.mesh().physics());

  RunRecord rec;
  rec.scenario_hash = scenario_hash(s);
  rec.physics = disc.mesh().physics();
  rec.degree = disc.degree();
  rec.dt = dt;

  SimState state = disc.zero_state();
  initialize_pulse(disc, s.pulse, 0.5 * (s.y0 + s.y1), state);

  for (const auto& loc : s.receivers) rec.receivers.push_back({loc, {}, {}});
  std::vector<long> snapshot_steps;
  for (double ts : s.snapshot_times) {
    snapshot_steps.push_back(std::lround(ts / dt));
    Snapshot snap;
    snap.requested = ts;
    rec.snapshots.push_back(snap);
  }
  if (options.window) rec.window = make_window(disc, *options.window, sel);

  auto observe = [&](long k) {
    const double t = state.t;
    rec.series.push_back({t, linf_norm(disc, state.fields, sel), discrete_energy(disc, state.fields)});
    for (auto& r : rec.receivers) {
      r.times.push_back(t);
      r.values.push_back(receiver_sample(disc, state.fields, r.location.x(), r.location.y()));
    }
    for (std::size_t i = 0; i < snapshot_steps.size(); ++i) {
      if (snapshot_steps[i] != k) continue;
      Snapshot& snap = rec.snapshots[i];
      snap.t = t;
      const int np = disc.nodes_per_element();
      snap.values.resize(static_cast<Eigen::Index>(disc.mesh().element_count()) * np, disc.field_count());
      snap.positions.clear();
      for (int e = 0; e < disc.mesh().element_count(); ++e) {
        snap.values.middleRows(static_cast<Eigen::Index>(e) * np, np) = disc.element_view(state.fields.u, e);
        for (int n = 0; n < np; ++n) snap.positions.push_back(disc.node_position(e, n));
      }
    }
    if (rec.window && (k % options.window_stride == 0 || k == steps))
      record_window(*rec.window, disc, state.fields, sel, t);
  };

  observe(0);
  const double l0 = rec.initial_linf();
  const auto rhs = [&disc](const Fields& f) { return disc.rhs(f); };
  for (long k = 1; k <= steps; ++k) {
    try {
      state = advance(state, dt, rhs);
    } catch (const UnstableRun& e) {
      rec.status = RunStatus::unstable;
      rec.blowup_time = e.time();
      rec.message = e.what();
      break;
    }
    state.t = static_cast<double>(k) * dt;
    rec.steps = k;
    observe(k);
    const double linf = rec.series.back().linf;
    if (!std::isfinite(linf) || (l0 > 0.0 && linf > options.blowup_factor * l0)) {
      rec.status = RunStatus::unstable;
      rec.blowup_time = state.t;
      rec.message = "L-inf norm exceeded the blow-up threshold";
      break;
    }
    if (options.stop_time && state.t >= *options.stop_time - 1e-12) break;
  }
  // Snapshots never reached (early stop or blow-up) are dropped.
  std::erase_if(rec.snapshots, [](const Snapshot& sn) { return sn.positions.empty(); });
  rec.final_state = std::move(state);
  return rec;
}

// ---------------------------------------------------------------------------
// Comparison

Scenario abc_variant(const Scenario& s) {
  Scenario out = s;
  out.kind = ScenarioKind::run;
  out.name = s.name + "-abc";
  out.pml.reset();  // d = 0: the outer boundary (r there) is all that is left
  out.comparison.reset();
  return out;
}

Scenario reference_variant(const Scenario& s, double reference_x1) {
  Scenario out = s;
  out.kind = ScenarioKind::run;
  out.name = s.name + "-reference";
  out.x1 = reference_x1;
  out.pml.reset();
  out.comparison.reset();
  out.receivers.clear();
  out.snapshot_times.clear();
  return out;
}

ComparisonResult compare_abc(const Scenario& s) {
  validate(s);
  if (!s.comparison) throw ConfigError("comparison", "required to compare against a reference");
  const ComparisonSpec& cmp = *s.comparison;
  RunOptions opt;
  opt.window = cmp.interior;
  opt.window_stride = cmp.window_stride;

  Scenario pml_s = s;
  pml_s.kind = ScenarioKind::run;
  pml_s.comparison.reset();

  ComparisonResult out;
  out.pml = run(pml_s, opt);
  out.abc = run(abc_variant(s), opt);
  out.reference = run(reference_variant(s, cmp.reference_x1), opt);
  if (out.pml.dt != out.reference.dt || out.abc.dt != out.reference.dt)
    throw ContractViolation("compare_abc: runs ended up with different time steps");

  double cp = wave_speeds(s.medium.medium).cp;
  if (s.interface) cp = std::max(cp, wave_speeds(s.interface->east.medium).cp);
  out.horizon = validity_horizon(cmp.reference_x1 - cmp.interior.x1, cp, s.element_size);
  out.pml_error = pml_error(*out.pml.window, *out.reference.window, out.horizon);
  out.abc_error = pml_error(*out.abc.window, *out.reference.window, out.horizon);
  return out;
}

// ---------------------------------------------------------------------------
// Convergence

Eigen::Vector3d standing_mode(const AcousticMedium& m, double x0, double y0, double l, double x,
                              double y, double t) {
  const double k = std::numbers::pi / l;
  const double omega = std::sqrt(m.kappa / m.rho) * k * std::numbers::sqrt2;
  const double cx = std::cos(k * (x - x0)), sx = std::sin(k * (x - x0));
  const double cy = std::cos(k * (y - y0)), sy = std::sin(k * (y - y0));
  const double amp = k / (m.rho * omega) * std::sin(omega * t);
  return {cx * cy * std::cos(omega * t), amp * sx * cy, amp * cx * sy};
}

std::vector<ConvergenceRow> convergence_study(const Scenario& s) {
  validate(s);
  if (!s.convergence) throw ConfigError("convergence", "required for a convergence study");
  if (s.medium.medium.physics() != Physics::acoustic)
    throw ConfigError("medium", "the standing-mode study needs an acoustic medium");
  const double l = s.x1 - s.x0;
  if (std::abs((s.y1 - s.y0) - l) > 1e-12 * l) throw ConfigError("domain", "must be square");
  const AcousticMedium& am = s.medium.medium.as_acoustic();

  std::vector<ConvergenceRow> rows;
  for (int degree : s.convergence->degrees) {
    std::optional<double> previous;
    for (int n : s.convergence->meshes) {
      SolverConfig cfg;
      cfg.degree = degree;
      cfg.cfl = s.cfl;
      cfg.final_time = s.convergence->final_time;
      cfg.boundary.r = {-1.0, -1.0, -1.0, -1.0};
      const double h = l / n;
      const Discretization disc(Mesh::uniform(s.x0, s.x1, s.y0, s.y1, h, s.medium.medium), cfg);
      SimState st = disc.zero_state();
      for (int e = 0; e < disc.mesh().element_count(); ++e) {
        auto u = disc.element_view(st.fields.u, e);
        for (int i = 0; i < disc.nodes_per_element(); ++i) {
          const Eigen::Vector2d x = disc.node_position(e, i);
          u.row(i) = standing_mode(am, s.x0, s.y0, l, x.x(), x.y(), 0.0).transpose();
        }
      }
      const auto [steps, dt] = step_plan(cfg.final_time, timestep(cfg, disc.mesh()));
      const auto rhs = [&disc](const Fields& f) { return disc.rhs(f); };
      for (long k = 1; k <= steps; ++k) {
        st = advance(st, dt, rhs);
        st.t = static_cast<double>(k) * dt;
      }
      const auto& w = disc.reference().weights;
      const int n1 = disc.nodes_1d();
      std::vector<double> partial;
      for (int e = 0; e < disc.mesh().element_count(); ++e) {
        const auto u = disc.element_view(st.fields.u, e);
        const double jac = disc.mesh().map(e).jacobian();
        double acc = 0.0;
        for (int i = 0; i < disc.nodes_per_element(); ++i) {
          const Eigen::Vector2d x = disc.node_position(e, i);
          const Eigen::Vector3d ex = standing_mode(am, s.x0, s.y0, l, x.x(), x.y(), st.t);
          acc += w(i % n1) * w(i / n1) * (u.row(i).transpose() - ex).squaredNorm();
        }
        partial.push_back(jac * acc);
      }
      ConvergenceRow row;
      row.degree = degree;
      row.elements = n;
      row.h = h;
      row.l2_error = std::sqrt(pairwise_sum(partial));
      if (previous && rows.back().degree == degree)
        row.order = std::log(*previous / row.l2_error) / std::log(rows.back().h / h);
      previous = row.l2_error;
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Artifacts

std::vector<std::string> field_names(Physics physics) {
  if (physics == Physics::acoustic) return {"p", "vx", "vy"};
  return {"vx", "vy", "sxx", "syy", "sxy"};
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string series_csv(const RunRecord& r) {
  std::string out = "t,linf,energy\n";
  for (const auto& row : r.series)
    out += format_number(row.t) + "," + format_number(row.linf) + "," + format_number(row.energy) + "\n";
  return out;
}

std::string receiver_csv(const RunRecord& r, std::size_t index) {
  const ReceiverTrace& tr = r.receivers.at(index);
  std::string out = "t";
  for (const auto& name : field_names(r.physics)) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    out += format_number(tr.times[i]);
    for (Eigen::Index c = 0; c < tr.values[i].size(); ++c) out += "," + format_number(tr.values[i](c));
    out += "\n";
  }
  return out;
}

std::string snapshot_csv(const RunRecord& r, std::size_t index) {
  const Snapshot& sn = r.snapshots.at(index);
  std::string out = "x,y";
  for (const auto& name : field_names(r.physics)) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < sn.positions.size(); ++i) {
    out += format_number(sn.positions[i].x()) + "," + format_number(sn.positions[i].y());
    for (Eigen::Index c = 0; c < sn.values.cols(); ++c)
      out += "," + format_number(sn.values(static_cast<Eigen::Index>(i), c));
    out += "\n";
  }
  return out;
}

json run_metadata(const RunRecord& r, const Scenario& s) {
  json snaps = json::array();
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", i);
    snaps.push_back({{"file", name}, {"requested", r.snapshots[i].requested}, {"t", r.snapshots[i].t}});
  }
  json receivers = json::array();
  for (std::size_t i = 0; i < r.receivers.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "receiver_%03zu.csv", i);
    receivers.push_back({{"file", name}, {"x", r.receivers[i].location.x()}, {"y", r.receivers[i].location.y()}});
  }
  json meta = {
      {"scenario_hash", r.scenario_hash},
      {"scenario", to_json(s)},
      {"degree", r.degree},
      {"dt", r.dt},
      {"steps", r.steps},
      {"status", r.status == RunStatus::completed ? "completed" : "unstable"},
      {"initial_linf", r.initial_linf()},
      {"max_linf", r.max_linf()},
      {"receivers", receivers},
      {"snapshots", snaps},
  };
  if (r.blowup_time) meta["blowup_time"] = *r.blowup_time;
  if (!r.message.empty()) meta["message"] = r.message;
  return meta;
}

void write_run_artifacts(const RunRecord& r, const Scenario& s, const std::string& dir) {
  const std::filesystem::path base(dir);
  std::filesystem::create_directories(base);
  write_text(base / "series.csv", series_csv(r));
  for (std::size_t i = 0; i < r.receivers.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "receiver_%03zu.csv", i);
    write_text(base / name, receiver_csv(r, i));
  }
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", i);
    write_text(base / name, snapshot_csv(r, i));
  }
  write_text(base / "metadata.json", run_metadata(r, s).dump(2) + "\n");
}

std::string error_csv(const ComparisonResult& c) {
  std::string out = "t,pml_linf,pml_l2,abc_linf,abc_l2\n";
  const std::size_t n = std::min(c.pml_error.times.size(), c.abc_error.times.size());
  for (std::size_t i = 0; i < n; ++i)
    out += format_number(c.pml_error.times[i]) + "," + format_number(c.pml_error.linf[i]) + "," +
           format_number(c.pml_error.l2[i]) + "," + format_number(c.abc_error.linf[i]) + "," +
           format_number(c.abc_error.l2[i]) + "\n";
  return out;
}

void write_comparison_artifacts(const ComparisonResult& c, const Scenario& s, const std::string& dir) {
  const std::filesystem::path base(dir);
  std::filesystem::create_directories(base);
  Scenario pml_s = s;
  pml_s.comparison.reset();
  pml_s.kind = ScenarioKind::run;
  write_run_artifacts(c.pml, pml_s, (base / "pml").string());
  write_run_artifacts(c.abc, abc_variant(s), (base / "abc").string());
  write_run_artifacts(c.reference, reference_variant(s, s.comparison->reference_x1),
                      (base / "reference").string());
  write_text(base / "errors.csv", error_csv(c));
  const json meta = {{"scenario_hash", scenario_hash(s)},
                     {"scenario", to_json(s)},
                     {"degree", c.pml.degree},
                     {"dt", c.pml.dt},
                     {"horizon", c.horizon},
                     {"pml_max_linf_error", c.pml_error.max_linf()},
                     {"abc_max_linf_error", c.abc_error.max_linf()}};
  write_text(base / "metadata.json", meta.dump(2) + "\n");
}

std::string stability_csv(const StabilityReport& report) {
  std::string out = "branch,angle,S_x,S_y,Vg_x,Vg_y,product_x,product_y\n";
  for (const auto& p : report.samples)
    out += std::to_string(p.branch) + "," + format_number(p.angle) + "," + format_number(p.slowness.x()) +
           "," + format_number(p.slowness.y()) + "," + format_number(p.group_velocity.x()) + "," +
           format_number(p.group_velocity.y()) + "," + format_number(p.product.x()) + "," +
           format_number(p.product.y()) + "\n";
  return out;
}

json stability_json(const StabilityReport& report, const std::string& medium_name) {
  json j = {{"medium", medium_name},
            {"axis", report.axis == Axis::x ? "x" : "y"},
            {"n_directions", report.n_directions},
            {"min_product", report.min_product},
            {"verdict", report.stable ? "stable" : "unstable"},
            {"skipped_angles", report.skipped_angles}};
  if (report.worst)
    j["worst"] = {{"branch", report.worst->branch},
                  {"angle", report.worst->angle},
                  {"direction", {report.worst->direction.x(), report.worst->direction.y()}},
                  {"product", report.worst->product_along(report.axis)}};
  return j;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "degree,elements,h,l2_error,order\n";
  for (const auto& r : rows)
    out += std::to_string(r.degree) + "," + std::to_string(r.elements) + "," + format_number(r.h) + "," +
           format_number(r.l2_error) + "," + (r.order ? format_number(*r.order) : std::string()) + "\n";
  return out;
}

Medium analysis_medium(const std::string& name) {
  if (name == "violating") return find_violating_medium(Axis::x);
  return medium_preset(name);
}

}  // namespace wavelab
