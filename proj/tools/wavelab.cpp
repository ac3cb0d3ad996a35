// wavelab command-line front end.
//
// Exit codes: 0 success, 2 configuration error, 3 unstable run,
// 4 numerical failure.

#include "wavelab/errors.hpp"
#include "wavelab/run.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace wavelab;

constexpr int kExitConfig = 2;
constexpr int kExitUnstable = 3;
constexpr int kExitNumerical = 4;

struct Overrides {
  std::optional<double> theta_x;
  std::optional<double> tol;
  std::optional<int> degree;
  std::optional<std::string> out;
};

void apply(const Overrides& o, Scenario& s) {
  if (o.theta_x) s.theta_x = *o.theta_x;
  if (o.degree) s.degree = *o.degree;
  if (o.tol) {
    if (!s.pml) throw ConfigError("pml.tol", "scenario has no PML to tune");
    s.pml->tol = *o.tol;
  }
  if (o.out) s.output_dir = *o.out;
  validate(s);
}

void save(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

// Comparison block for a plain PML scenario: interior is the domain minus the
// layer, reference extends the domain to three times the interior half-width.
void default_comparison(Scenario& s) {
  if (s.comparison) return;
  if (!s.pml || s.pml->sides.size() != 1 || s.pml->sides.front() != Face::east)
    throw ConfigError("comparison", "only an east-side layer can be compared automatically");
  ComparisonSpec c;
  const double interior_x1 = s.x1 - s.pml->width;
  const double half = 0.5 * (interior_x1 - s.x0);
  c.interior = {s.x0, interior_x1, s.y0, s.y1};
  c.reference_x1 = s.x0 + 4.0 * half;
  c.window_stride = 1;
  s.comparison = c;
  s.kind = ScenarioKind::comparison;
  validate(s);
}

int run_comparison(Scenario s) {
  default_comparison(s);
  const ComparisonResult c = compare_abc(s);
  write_comparison_artifacts(c, s, s.output_dir);
  std::printf("horizon %.6g s\nmax interior L-inf error: PML %.6g, ABC %.6g\n", c.horizon,
              c.pml_error.max_linf(), c.abc_error.max_linf());
  for (const RunRecord* r : {&c.pml, &c.abc, &c.reference})
    if (r->status != RunStatus::completed) return kExitUnstable;
  return 0;
}

int run_analysis(const Scenario& s) {
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& name : s.analysis->media) {
    const Medium m = analysis_medium(name);
    for (Axis axis : s.analysis->axes) {
      const StabilityReport rep = geometric_stability_check(m, axis, s.analysis->directions);
      const std::string stem = name + "_" + (axis == Axis::x ? "x" : "y");
      save(std::filesystem::path(s.output_dir) / (stem + ".csv"), stability_csv(rep));
      auto j = stability_json(rep, name);
      save(std::filesystem::path(s.output_dir) / (stem + ".json"), j.dump(2) + "\n");
      reports.push_back(std::move(j));
    }
  }
  std::cout << reports.dump(2) << "\n";
  return 0;
}

int run_convergence(const Scenario& s) {
  const auto rows = convergence_study(s);
  const std::string csv = convergence_csv(rows);
  save(std::filesystem::path(s.output_dir) / "convergence.csv", csv);
  std::cout << csv;
  return 0;
}

int run_plain(const Scenario& s) {
  const RunRecord r = run(s);
  write_run_artifacts(r, s, s.output_dir);
  std::printf("%s: %ld steps, dt %.6g s, max L-inf %.6g (initial %.6g)\n", s.name.c_str(), r.steps, r.dt,
              r.max_linf(), r.initial_linf());
  if (r.status != RunStatus::completed) {
    std::fprintf(stderr, "unstable run: blow-up at t = %.6g s (%s)\n", r.blowup_time.value_or(0.0),
                 r.message.c_str());
    return kExitUnstable;
  }
  return 0;
}

int dispatch(const Scenario& s) {
  switch (s.kind) {
    case ScenarioKind::run: return run_plain(s);
    case ScenarioKind::comparison: return run_comparison(s);
    case ScenarioKind::analysis: return run_analysis(s);
    case ScenarioKind::convergence: return run_convergence(s);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavelab: DG/SBP wave solver with a stabilized PML"};
  app.require_subcommand(1);

  std::string scenario_arg;
  Overrides ov;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario file or shipped preset");
  run_cmd->add_option("scenario", scenario_arg, "Scenario JSON path or preset name")->required();
  run_cmd->add_option("--theta-x", ov.theta_x, "PML stabilizing parameter along x");
  run_cmd->add_option("--tol", ov.tol, "PML reflection tolerance");
  run_cmd->add_option("--degree", ov.degree, "Polynomial degree N");
  run_cmd->add_option("--out", ov.out, "Output directory");

  std::string medium_name;
  std::string axis_name = "x";
  int directions = kDefaultDirections;
  std::string analyze_out = "out/analyze";
  auto* analyze_cmd = app.add_subcommand("analyze", "Geometric stability check of a medium");
  analyze_cmd->add_option("--medium", medium_name, "Medium preset name (or 'violating')")->required();
  analyze_cmd->add_option("--axis", axis_name, "Layer axis")->check(CLI::IsMember({"x", "y"}));
  analyze_cmd->add_option("--directions", directions, "Number of sampled directions");
  analyze_cmd->add_option("--out", analyze_out, "Output directory");

  std::string compare_arg;
  std::optional<std::string> compare_out;
  auto* compare_cmd = app.add_subcommand("compare-abc", "PML versus ABC against a large reference");
  compare_cmd->add_option("scenario", compare_arg, "Scenario JSON path or preset name")->required();
  compare_cmd->add_option("--out", compare_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) {
      Scenario s = resolve_scenario(scenario_arg);
      apply(ov, s);
      return dispatch(s);
    }
    if (*analyze_cmd) {
      Scenario s;
      s.kind = ScenarioKind::analysis;
      s.name = "analyze";
      s.output_dir = analyze_out;
      s.analysis = AnalysisSpec{{medium_name}, {parse_axis(axis_name, "--axis")}, directions};
      if (medium_name != "violating") parse_medium(medium_name, "--medium");
      if (directions < 16) throw ConfigError("--directions", "must be >= 16");
      return run_analysis(s);
    }
    if (*compare_cmd) {
      Scenario s = resolve_scenario(compare_arg);
      if (compare_out) s.output_dir = *compare_out;
      return run_comparison(s);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const InvalidMedium& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const UnstableRun& e) {
    std::fprintf(stderr, "unstable run at t = %.6g s: %s\n", e.time(), e.what());
    return kExitUnstable;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
