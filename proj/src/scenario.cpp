#include "wavelab/scenario.hpp"

#include "wavelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

namespace wavelab {

using nlohmann::json;

namespace {

const char* face_name(Face f) {
  switch (f) {
    case Face::west: return "west";
    case Face::east: return "east";
    case Face::south: return "south";
    case Face::north: return "north";
  }
  return "?";
}

Face parse_face(const std::string& text, const std::string& key) {
  for (Face f : {Face::west, Face::east, Face::south, Face::north})
    if (text == face_name(f)) return f;
  throw ConfigError(key, "unknown side '" + text + "' (expected west, east, south or north)");
}

const char* kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::run: return "run";
    case ScenarioKind::comparison: return "comparison";
    case ScenarioKind::analysis: return "analysis";
    case ScenarioKind::convergence: return "convergence";
  }
  return "?";
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Typed access to one JSON object, rejecting keys nobody asked about.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  const json& raw(const std::string& key) {
    if (!has(key)) throw ConfigError(join(path_, key), "required key is missing");
    return obj_.at(key);
  }

  std::string key(const std::string& k) const { return join(path_, k); }

  double number(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number()) throw ConfigError(key(k), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(key(k), "must be finite");
    return x;
  }
  double number(const std::string& k, double fallback) { return has(k) ? number(k) : fallback; }

  int integer(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number_integer()) throw ConfigError(key(k), "expected an integer");
    return v.get<int>();
  }
  int integer(const std::string& k, int fallback) { return has(k) ? integer(k) : fallback; }

  std::string string(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_string()) throw ConfigError(key(k), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& k, const std::string& fallback) {
    return has(k) ? string(k) : fallback;
  }

  std::pair<double, double> interval(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ConfigError(key(k), "expected [lower, upper]");
    const double a = v[0].get<double>(), b = v[1].get<double>();
    if (!(b > a)) throw ConfigError(key(k), "upper bound must exceed lower bound");
    return {a, b};
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(key(it.key()), "unknown key");
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

bool is_integer_multiple(double length, double h) {
  const double n = length / h;
  return std::abs(n - std::round(n)) <= 1e-9 * std::max(1.0, n) && std::round(n) >= 1.0;
}

Eigen::Vector2d parse_point(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(key, "expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

json medium_to_json(const MediumSpec& spec) {
  json out;
  if (spec.name != "custom") return {{"preset", spec.name}};
  if (spec.medium.physics() == Physics::acoustic) {
    const auto& a = spec.medium.as_acoustic();
    out["type"] = "acoustic";
    out["rho"] = a.rho;
    out["kappa"] = a.kappa;
  } else {
    const auto& e = spec.medium.as_elastic();
    out["type"] = "elastic";
    out["rho"] = e.rho;
    out["c11"] = e.c11;
    out["c12"] = e.c12;
    out["c22"] = e.c22;
    out["c33"] = e.c33;
  }
  return out;
}

}  // namespace

Axis parse_axis(const std::string& text, const std::string& key) {
  if (text == "x") return Axis::x;
  if (text == "y") return Axis::y;
  throw ConfigError(key, "expected axis 'x' or 'y'");
}

MediumSpec parse_medium(const json& value, const std::string& key) {
  MediumSpec spec;
  try {
    if (value.is_string()) {
      spec.name = value.get<std::string>();
      spec.medium = medium_preset(spec.name);
      return spec;
    }
    ObjectReader r(value, key);
    if (r.has("preset")) {
      spec.name = r.string("preset");
      r.finish();
      spec.medium = medium_preset(spec.name);
      return spec;
    }
    const std::string type = r.string("type", r.has("kappa") ? "acoustic" : "elastic");
    if (type != "acoustic" && type != "elastic")
      throw ConfigError(key + ".type", "expected 'acoustic' or 'elastic'");
    const double rho = r.number("rho");
    if (type == "acoustic") {
      spec.medium = Medium::acoustic(rho, r.number("kappa"));
    } else {
      spec.medium = Medium::elastic(rho, r.number("c11"), r.number("c12"), r.number("c22"),
                                    r.number("c33"));
    }
    r.finish();
    return spec;
  } catch (const InvalidMedium& e) {
    throw ConfigError(key, e.what());
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

void validate(const Scenario& s) {
  const double lx = s.x1 - s.x0;
  const double ly = s.y1 - s.y0;
  if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("domain", "extents must be positive");
  if (!(s.element_size > 0.0)) throw ConfigError("element_size", "must be > 0");
  if (!is_integer_multiple(lx, s.element_size) || !is_integer_multiple(ly, s.element_size))
    throw ConfigError("element_size", "must divide both domain extents");
  if (s.degree < 1 || s.degree > kMaxDegree) throw ConfigError("degree", "must lie in [1, 12]");
  if (!(s.theta_x >= 0.0 && s.theta_x <= 1.0)) throw ConfigError("theta.x", "must lie in [0, 1]");
  if (!(s.theta_y >= 0.0 && s.theta_y <= 1.0)) throw ConfigError("theta.y", "must lie in [0, 1]");
  for (Face f : {Face::west, Face::east, Face::south, Face::north})
    if (!(std::abs(s.boundary.at(f)) <= 1.0))
      throw ConfigError(std::string("boundary.") + face_name(f), "reflection coefficient must satisfy |r| <= 1");
  if (!(s.cfl > 0.0 && s.cfl <= 1.0)) throw ConfigError("cfl", "must lie in (0, 1]");
  if (s.kind != ScenarioKind::analysis && !(s.final_time > 0.0))
    throw ConfigError("final_time", "must be > 0");

  if (s.pml) {
    const PmlSpec& p = *s.pml;
    if (p.sides.empty()) throw ConfigError("pml.sides", "list at least one side");
    std::set<int> unique;
    for (Face f : p.sides)
      if (!unique.insert(static_cast<int>(f)).second)
        throw ConfigError("pml.sides", std::string("side '") + face_name(f) + "' listed twice");
    if (!(p.width > 0.0)) throw ConfigError("pml.width_km", "must be > 0");
    if (!is_integer_multiple(p.width, s.element_size))
      throw ConfigError("pml.width_km", "must span an integer number of elements");
    for (Face f : p.sides) {
      const double extent = face_axis(f) == Axis::x ? lx : ly;
      if (!(p.width < extent)) throw ConfigError("pml.width_km", "layer is as wide as the domain");
    }
    if (!(p.tol > 0.0 && p.tol <= 1.0)) throw ConfigError("pml.tol", "must lie in (0, 1]");
    if (!(p.alpha >= 0.0)) throw ConfigError("pml.alpha", "must be >= 0");
    if (!(p.gamma > 0.0)) throw ConfigError("pml.gamma", "must be > 0");
    if (!(p.exponent >= 0.0)) throw ConfigError("pml.exponent", "must be >= 0");
  }
  if (s.interface) {
    const double x = s.interface->x;
    if (!(x > s.x0 && x < s.x1) || !is_integer_multiple(x - s.x0, s.element_size))
      throw ConfigError("interface.x", "must coincide with an interior element edge");
    if (s.interface->east.medium.physics() != s.medium.medium.physics())
      throw ConfigError("interface.medium", "both media must share one physics");
  }
  const Box domain{s.x0, s.x1, s.y0, s.y1};
  for (std::size_t i = 0; i < s.receivers.size(); ++i)
    if (!domain.contains(s.receivers[i].x(), s.receivers[i].y(), 0.0))
      throw ConfigError("receivers[" + std::to_string(i) + "]", "location outside the domain");
  for (std::size_t i = 0; i < s.snapshot_times.size(); ++i)
    if (!(s.snapshot_times[i] >= 0.0 && s.snapshot_times[i] <= s.final_time))
      throw ConfigError("snapshot_times[" + std::to_string(i) + "]", "must lie in [0, final_time]");

  if (s.kind == ScenarioKind::comparison) {
    if (!s.comparison) throw ConfigError("comparison", "required for kind 'comparison'");
    if (!s.pml) throw ConfigError("pml", "a comparison needs a PML to compare against");
    const auto& c = *s.comparison;
    if (!(c.reference_x1 > s.x1) || !is_integer_multiple(c.reference_x1 - s.x0, s.element_size))
      throw ConfigError("comparison.reference_x1",
                        "must lie east of the domain on an element edge");
    if (!(c.interior.x1 > c.interior.x0 && c.interior.y1 > c.interior.y0) ||
        !domain.contains(c.interior.x0, c.interior.y0, 1e-9) ||
        !domain.contains(c.interior.x1, c.interior.y1, 1e-9))
      throw ConfigError("comparison.interior", "box must lie inside the domain");
    if (c.window_stride < 1) throw ConfigError("comparison.window_stride", "must be >= 1");
  }
  if (s.kind == ScenarioKind::analysis) {
    if (!s.analysis || s.analysis->media.empty())
      throw ConfigError("analysis.media", "list at least one medium");
    if (s.analysis->directions < 16) throw ConfigError("analysis.directions", "must be >= 16");
  }
  if (s.kind == ScenarioKind::convergence) {
    if (!s.convergence) throw ConfigError("convergence", "required for kind 'convergence'");
    for (int n : s.convergence->degrees)
      if (n < 1 || n > kMaxDegree) throw ConfigError("convergence.degrees", "must lie in [1, 12]");
    if (s.convergence->meshes.size() < 2)
      throw ConfigError("convergence.meshes", "need at least two meshes");
    for (int n : s.convergence->meshes)
      if (n < 1) throw ConfigError("convergence.meshes", "element counts must be >= 1");
    if (!(s.convergence->final_time > 0.0))
      throw ConfigError("convergence.final_time", "must be > 0");
  }
}

Scenario parse_scenario(const json& doc) {
  ObjectReader root(doc, "");
  Scenario s;
  const std::string schema = root.string("schema");
  if (schema != kScenarioSchema)
    throw ConfigError("schema", "unsupported schema '" + schema + "' (expected " + kScenarioSchema + ")");
  s.name = root.string("name", "unnamed");
  const std::string kind = root.string("kind", "run");
  if (kind == "run") s.kind = ScenarioKind::run;
  else if (kind == "comparison") s.kind = ScenarioKind::comparison;
  else if (kind == "analysis") s.kind = ScenarioKind::analysis;
  else if (kind == "convergence") s.kind = ScenarioKind::convergence;
  else throw ConfigError("kind", "expected run, comparison, analysis or convergence");

  if (s.kind == ScenarioKind::analysis) {
    // Analysis scenarios carry no mesh; domain keys are optional.
    if (root.has("domain")) {
      ObjectReader d(root.raw("domain"), "domain");
      std::tie(s.x0, s.x1) = d.interval("x");
      std::tie(s.y0, s.y1) = d.interval("y");
      d.finish();
    }
    s.element_size = root.number("element_size", std::min(s.x1 - s.x0, s.y1 - s.y0));
  } else {
    ObjectReader d(root.raw("domain"), "domain");
    std::tie(s.x0, s.x1) = d.interval("x");
    std::tie(s.y0, s.y1) = d.interval("y");
    d.finish();
    s.element_size = root.number("element_size");
  }
  s.degree = root.integer("degree", 4);
  if (root.has("medium")) s.medium = parse_medium(root.raw("medium"), "medium");
  else if (s.kind != ScenarioKind::analysis) throw ConfigError("medium", "required key is missing");

  if (root.has("interface")) {
    ObjectReader r(root.raw("interface"), "interface");
    InterfaceSpec in;
    in.x = r.number("x");
    in.east = parse_medium(r.raw("medium"), "interface.medium");
    r.finish();
    s.interface = in;
  }

  if (root.has("pml") && !root.raw("pml").is_null()) {
    ObjectReader r(root.raw("pml"), "pml");
    PmlSpec p;
    const json& sides = r.raw("sides");
    if (!sides.is_array()) throw ConfigError("pml.sides", "expected a list of side names");
    for (std::size_t i = 0; i < sides.size(); ++i) {
      const std::string key = "pml.sides[" + std::to_string(i) + "]";
      if (!sides[i].is_string()) throw ConfigError(key, "expected a side name");
      p.sides.push_back(parse_face(sides[i].get<std::string>(), key));
    }
    p.width = r.number("width_km");
    p.tol = r.number("tol", kDefaultPmlTol);
    p.alpha = r.number("alpha", kDefaultCfsAlpha);
    p.gamma = r.number("gamma", 1.0);
    p.exponent = r.number("exponent", 3.0);
    r.finish();
    s.pml = p;
  }

  if (root.has("theta")) {
    ObjectReader r(root.raw("theta"), "theta");
    s.theta_x = r.number("x", 1.0);
    s.theta_y = r.number("y", 1.0);
    r.finish();
  }
  if (root.has("boundary")) {
    ObjectReader r(root.raw("boundary"), "boundary");
    for (Face f : {Face::west, Face::east, Face::south, Face::north})
      s.boundary.at(f) = r.number(face_name(f), s.boundary.at(f));
    r.finish();
  }
  s.cfl = root.number("cfl", 0.9);
  s.final_time = root.number("final_time", 0.0);

  if (root.has("initial_pulse")) {
    ObjectReader r(root.raw("initial_pulse"), "initial_pulse");
    s.pulse.x0 = r.number("x0", 0.0);
    if (r.has("y0")) s.pulse.y0 = r.number("y0");
    s.pulse.width = r.number("width", 9.0);
    s.pulse.amplitude = r.number("amplitude", 1.0);
    if (!(s.pulse.width > 0.0)) throw ConfigError("initial_pulse.width", "must be > 0");
    r.finish();
  }
  if (root.has("receivers")) {
    const json& rec = root.raw("receivers");
    if (!rec.is_array()) throw ConfigError("receivers", "expected a list of [x, y] points");
    for (std::size_t i = 0; i < rec.size(); ++i)
      s.receivers.push_back(parse_point(rec[i], "receivers[" + std::to_string(i) + "]"));
  }
  if (root.has("snapshot_times")) {
    const json& st = root.raw("snapshot_times");
    if (!st.is_array()) throw ConfigError("snapshot_times", "expected a list of times");
    for (std::size_t i = 0; i < st.size(); ++i) {
      if (!st[i].is_number())
        throw ConfigError("snapshot_times[" + std::to_string(i) + "]", "expected a number");
      s.snapshot_times.push_back(st[i].get<double>());
    }
  }
  s.output_dir = root.string("output_dir", "out/" + s.name);

  if (root.has("comparison")) {
    ObjectReader r(root.raw("comparison"), "comparison");
    ComparisonSpec c;
    c.reference_x1 = r.number("reference_x1");
    ObjectReader b(r.raw("interior"), "comparison.interior");
    std::tie(c.interior.x0, c.interior.x1) = b.interval("x");
    std::tie(c.interior.y0, c.interior.y1) = b.interval("y");
    b.finish();
    c.window_stride = r.integer("window_stride", 1);
    r.finish();
    s.comparison = c;
  }
  if (root.has("analysis")) {
    ObjectReader r(root.raw("analysis"), "analysis");
    AnalysisSpec a;
    const json& media = r.raw("media");
    if (!media.is_array()) throw ConfigError("analysis.media", "expected a list of preset names");
    for (std::size_t i = 0; i < media.size(); ++i) {
      const std::string key = "analysis.media[" + std::to_string(i) + "]";
      if (!media[i].is_string()) throw ConfigError(key, "expected a preset name");
      a.media.push_back(media[i].get<std::string>());
      if (a.media.back() != "violating") parse_medium(media[i], key);
    }
    if (r.has("axes")) {
      a.axes.clear();
      const json& axes = r.raw("axes");
      if (!axes.is_array()) throw ConfigError("analysis.axes", "expected a list of axes");
      for (std::size_t i = 0; i < axes.size(); ++i) {
        const std::string key = "analysis.axes[" + std::to_string(i) + "]";
        if (!axes[i].is_string()) throw ConfigError(key, "expected 'x' or 'y'");
        a.axes.push_back(parse_axis(axes[i].get<std::string>(), key));
      }
    }
    a.directions = r.integer("directions", 720);
    r.finish();
    s.analysis = a;
  }
  if (root.has("convergence")) {
    ObjectReader r(root.raw("convergence"), "convergence");
    ConvergenceSpec c;
    auto ints = [&](const std::string& k, std::vector<int>& out) {
      if (!r.has(k)) return;
      const json& v = r.raw(k);
      if (!v.is_array()) throw ConfigError(r.key(k), "expected a list of integers");
      out.clear();
      for (const auto& x : v) {
        if (!x.is_number_integer()) throw ConfigError(r.key(k), "expected a list of integers");
        out.push_back(x.get<int>());
      }
    };
    ints("degrees", c.degrees);
    ints("meshes", c.meshes);
    c.final_time = r.number("final_time", 0.5);
    r.finish();
    s.convergence = c;
  }
  root.finish();
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

std::string preset_directory() {
  if (const char* env = std::getenv("WAVELAB_PRESET_DIR")) return env;
#ifdef WAVELAB_PRESET_DIR
  return WAVELAB_PRESET_DIR;
#else
  return "presets";
#endif
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(preset_directory(), ec))
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

Scenario resolve_scenario(const std::string& path_or_preset) {
  if (std::filesystem::exists(path_or_preset)) return load_scenario(path_or_preset);
  const auto preset = std::filesystem::path(preset_directory()) / (path_or_preset + ".json");
  if (std::filesystem::exists(preset)) return load_scenario(preset.string());
  throw ConfigError("<scenario>", "'" + path_or_preset + "' is neither a file nor a preset name");
}

json to_json(const Scenario& s) {
  json j;
  j["schema"] = kScenarioSchema;
  j["name"] = s.name;
  j["kind"] = kind_name(s.kind);
  j["domain"] = {{"x", {s.x0, s.x1}}, {"y", {s.y0, s.y1}}};
  j["element_size"] = s.element_size;
  j["degree"] = s.degree;
  if (s.kind != ScenarioKind::analysis) j["medium"] = medium_to_json(s.medium);
  if (s.interface) j["interface"] = {{"x", s.interface->x}, {"medium", medium_to_json(s.interface->east)}};
  if (s.pml) {
    json sides = json::array();
    for (Face f : s.pml->sides) sides.push_back(face_name(f));
    j["pml"] = {{"sides", sides},           {"width_km", s.pml->width}, {"tol", s.pml->tol},
                {"alpha", s.pml->alpha},    {"gamma", s.pml->gamma}, {"exponent", s.pml->exponent}};
  }
  j["theta"] = {{"x", s.theta_x}, {"y", s.theta_y}};
  j["boundary"] = {{"west", s.boundary.at(Face::west)},
                   {"east", s.boundary.at(Face::east)},
                   {"south", s.boundary.at(Face::south)},
                   {"north", s.boundary.at(Face::north)}};
  j["cfl"] = s.cfl;
  j["final_time"] = s.final_time;
  json pulse = {{"x0", s.pulse.x0}, {"width", s.pulse.width}, {"amplitude", s.pulse.amplitude}};
  if (s.pulse.y0) pulse["y0"] = *s.pulse.y0;
  j["initial_pulse"] = pulse;
  json rec = json::array();
  for (const auto& r : s.receivers) rec.push_back({r.x(), r.y()});
  j["receivers"] = rec;
  j["snapshot_times"] = s.snapshot_times;
  j["output_dir"] = s.output_dir;
  if (s.comparison) {
    const auto& c = *s.comparison;
    j["comparison"] = {{"reference_x1", c.reference_x1},
                       {"interior", {{"x", {c.interior.x0, c.interior.x1}}, {"y", {c.interior.y0, c.interior.y1}}}},
                       {"window_stride", c.window_stride}};
  }
  if (s.analysis) {
    json axes = json::array();
    for (Axis a : s.analysis->axes) axes.push_back(a == Axis::x ? "x" : "y");
    j["analysis"] = {{"media", s.analysis->media}, {"axes", axes}, {"directions", s.analysis->directions}};
  }
  if (s.convergence)
    j["convergence"] = {{"degrees", s.convergence->degrees},
                        {"meshes", s.convergence->meshes},
                        {"final_time", s.convergence->final_time}};
  return j;
}

std::string scenario_hash(const Scenario& s) {
  json canonical = to_json(s);
  canonical.erase("output_dir");  // where results go does not change them
  const std::string text = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Mesh build_mesh(const Scenario& s) {
  Mesh uniform = Mesh::uniform(s.x0, s.x1, s.y0, s.y1, s.element_size, s.medium.medium);
  if (!s.interface) return uniform;
  std::vector<int> ids(uniform.element_count(), 0);
  for (int e = 0; e < uniform.element_count(); ++e) {
    const AffineMap m = uniform.map(e);
    if (0.5 * (m.x0 + m.x1) > s.interface->x) ids[e] = 1;
  }
  return Mesh(uniform.x_breaks(), uniform.y_breaks(), {s.medium.medium, s.interface->east.medium},
              std::move(ids));
}

SolverConfig build_solver_config(const Scenario& s) {
  SolverConfig c;
  c.degree = s.degree;
  c.theta_x = s.theta_x;
  c.theta_y = s.theta_y;
  c.cfl = s.cfl;
  c.final_time = s.final_time;
  c.boundary = s.boundary;
  return c;
}

std::vector<PmlProfile> build_pml_profiles(const Scenario& s) {
  std::vector<PmlProfile> out;
  if (!s.pml) return out;
  double cp = wave_speeds(s.medium.medium).cp;
  if (s.interface) cp = std::max(cp, wave_speeds(s.interface->east.medium).cp);
  for (Face f : s.pml->sides) {
    PmlProfile p;
    p.axis = face_axis(f);
    p.direction = face_sign(f);
    const double lo = p.axis == Axis::x ? s.x0 : s.y0;
    const double hi = p.axis == Axis::x ? s.x1 : s.y1;
    p.interior_extent = p.direction > 0 ? hi - s.pml->width : lo + s.pml->width;
    p.width = s.pml->width;
    p.strength = damping_strength(cp, s.pml->width, s.pml->tol);
    p.exponent = s.pml->exponent;
    p.cfs_alpha = s.pml->alpha;
    p.gamma = s.pml->gamma;
    out.push_back(p);
  }
  return out;
}

}  // namespace wavelab
