#pragma once

// Experiment drivers and their on-disk artifacts.

#include "wavelab/analysis.hpp"
#include "wavelab/diagnostics.hpp"
#include "wavelab/scenario.hpp"
#include "wavelab/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wavelab {

struct SeriesRow {
  double t = 0.0;
  double linf = 0.0;    // whole domain, natural field (pressure or particle speed)
  double energy = 0.0;
};

struct ReceiverTrace {
  Eigen::Vector2d location;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;
};

struct Snapshot {
  double requested = 0.0;
  double t = 0.0;
  std::vector<Eigen::Vector2d> positions;
  Eigen::MatrixXd values;  // nodes x fields
};

enum class RunStatus { completed, unstable };

struct RunRecord {
  std::string scenario_hash;
  Physics physics = Physics::acoustic;
  int degree = 0;
  double dt = 0.0;
  long steps = 0;
  std::vector<SeriesRow> series;
  std::vector<ReceiverTrace> receivers;
  std::vector<Snapshot> snapshots;
  std::optional<WindowRecord> window;
  SimState final_state;
  RunStatus status = RunStatus::completed;
  std::optional<double> blowup_time;
  std::string message;

  double initial_linf() const { return series.empty() ? 0.0 : series.front().linf; }
  double max_linf() const;
};

struct RunOptions {
  std::optional<Box> window;  // record interior samples for later comparison
  int window_stride = 1;
  /// Abort as unstable once L-inf exceeds this multiple of its initial value.
  double blowup_factor = 1e12;
  /// Stop early (the record then ends at the first step reaching this time).
  std::optional<double> stop_time;
};

/// p (acoustic) or vx = vy (elastic) set to the Gaussian pulse, all else zero.
void initialize_pulse(const Discretization& disc, const PulseSpec& pulse, double y_mid,
                      SimState& state);

/// Executes a run-kind scenario. Blow-up is reported in the record, not thrown.
RunRecord run(const Scenario& scenario, const RunOptions& options = {});

/// Step count and uniform step that land exactly on `final_time`.
std::pair<long, double> step_plan(double final_time, double dt_max);

struct ComparisonResult {
  RunRecord pml;
  RunRecord abc;
  RunRecord reference;
  ErrorSeries pml_error;
  ErrorSeries abc_error;
  double horizon = 0.0;
};

/// Scenario variants used by the comparison.
Scenario abc_variant(const Scenario& s);
Scenario reference_variant(const Scenario& s, double reference_x1);

ComparisonResult compare_abc(const Scenario& scenario);

struct ConvergenceRow {
  int degree = 0;
  int elements = 0;  // per direction
  double h = 0.0;
  double l2_error = 0.0;
  std::optional<double> order;  // against the previous (coarser) mesh
};

/// Closed-box standing acoustic mode on the scenario domain.
std::vector<ConvergenceRow> convergence_study(const Scenario& scenario);

/// Exact standing mode (p, vx, vy) at (x, y, t) on [x0,x0+l]^2 with v_n = 0 walls.
Eigen::Vector3d standing_mode(const AcousticMedium& m, double x0, double y0, double l, double x,
                              double y, double t);

// ---------------------------------------------------------------------------
// Artifacts. Numbers are written with %.17g so repeated runs are bytewise equal.

std::vector<std::string> field_names(Physics physics);
std::string format_number(double v);

std::string series_csv(const RunRecord& r);
std::string receiver_csv(const RunRecord& r, std::size_t index);
std::string snapshot_csv(const RunRecord& r, std::size_t index);
nlohmann::json run_metadata(const RunRecord& r, const Scenario& s);
void write_run_artifacts(const RunRecord& r, const Scenario& s, const std::string& dir);

std::string error_csv(const ComparisonResult& c);
void write_comparison_artifacts(const ComparisonResult& c, const Scenario& s, const std::string& dir);

std::string stability_csv(const StabilityReport& report);
nlohmann::json stability_json(const StabilityReport& report, const std::string& medium_name);

std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

/// Medium by preset name; "violating" yields the scanned unstable medium.
Medium analysis_medium(const std::string& name);

}  // namespace wavelab
