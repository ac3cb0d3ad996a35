#pragma once

// Scenario files: versioned JSON describing one experiment.

#include "wavelab/diagnostics.hpp"
#include "wavelab/media.hpp"
#include "wavelab/solver.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wavelab {

inline constexpr const char* kScenarioSchema = "wavelab.scenario/1";

enum class ScenarioKind { run, comparison, analysis, convergence };

/// Named medium: `name` is a preset name or "custom".
struct MediumSpec {
  std::string name = "custom";
  Medium medium = Medium::acoustic(1.0, 1.0);
};

/// A second medium to the east of a vertical line x = `x`.
struct InterfaceSpec {
  double x = 0.0;
  MediumSpec east;
};

struct PmlSpec {
  std::vector<Face> sides;
  double width = 0.0;
  double tol = kDefaultPmlTol;
  double alpha = kDefaultCfsAlpha;
  double gamma = 1.0;
  double exponent = 3.0;
};

/// f = amplitude exp(-ln2 ((x-x0)^2 + (y-y0)^2) / width).
struct PulseSpec {
  double x0 = 0.0;
  std::optional<double> y0;  // defaults to mid-height
  double width = 9.0;
  double amplitude = 1.0;
};

struct ComparisonSpec {
  double reference_x1 = 0.0;  // east end of the enlarged reference domain
  Box interior;
  int window_stride = 1;
};

struct AnalysisSpec {
  std::vector<std::string> media;
  std::vector<Axis> axes{Axis::x, Axis::y};
  int directions = 720;
};

struct ConvergenceSpec {
  std::vector<int> degrees{2, 3};
  std::vector<int> meshes{10, 20, 40};
  double final_time = 0.5;
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::run;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  double element_size = 1.0;
  int degree = 4;
  MediumSpec medium;
  std::optional<InterfaceSpec> interface;
  std::optional<PmlSpec> pml;
  double theta_x = 1.0;
  double theta_y = 1.0;
  BoundaryReflection boundary;
  double cfl = 0.9;
  double final_time = 0.0;
  PulseSpec pulse;
  std::vector<Eigen::Vector2d> receivers;
  std::vector<double> snapshot_times;
  std::string output_dir = "out";
  std::optional<ComparisonSpec> comparison;
  std::optional<AnalysisSpec> analysis;
  std::optional<ConvergenceSpec> convergence;
};

/// Parse and validate; throws ConfigError naming the offending key.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

/// Accepts a path or the name of a shipped preset.
Scenario resolve_scenario(const std::string& path_or_preset);
std::string preset_directory();
std::vector<std::string> preset_names();

/// Re-check invariants after programmatic edits (CLI overrides).
void validate(const Scenario& s);

/// Canonical JSON form; round-trips through parse_scenario.
nlohmann::json to_json(const Scenario& s);
/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string scenario_hash(const Scenario& s);

MediumSpec parse_medium(const nlohmann::json& value, const std::string& key);
Axis parse_axis(const std::string& text, const std::string& key);

/// Discretization ingredients derived from a scenario.
Mesh build_mesh(const Scenario& s);
SolverConfig build_solver_config(const Scenario& s);
std::vector<PmlProfile> build_pml_profiles(const Scenario& s);

}  // namespace wavelab
