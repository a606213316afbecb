#include "sonarfield/scenario_io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "sonarfield/errors.h"

namespace sonarfield {

using nlohmann::json;

namespace {

// Reads one JSON object, tracking the dotted path for messages and rejecting
// keys nobody asked for.
class Fields {
 public:
  Fields(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "must be an object");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ValidationError(where + ": " + what);
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  const json& raw(const std::string& key) {
    if (!has(key)) fail(at(key), "is required");
    return node_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) fail(at(key), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(at(key), "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::uint64_t count(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      fail(at(key), "must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) { return has(key) ? count(key) : fallback; }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) fail(at(key), "must be true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) fail(at(key), "must be a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : fallback; }

  std::pair<double, double> interval(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(at(key), "must be a [lo, hi] pair of numbers");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) fail(at(key), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class Fn>
auto with_prefix(const std::string& prefix, Fn fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + "." + e.what());
  }
}

SonarEnvironment parse_environment(const json& node) {
  Fields f(node, "environment");
  SonarEnvironment env;
  env.f_m_hz = f.number("f_m_hz", env.f_m_hz);
  env.bandwidth_hz = f.number("bandwidth_hz", env.bandwidth_hz);
  env.ssl_db = f.number("ssl_db", env.ssl_db);
  env.nsl_db = f.number("nsl_db", env.nsl_db);
  env.alpha_m = f.number("alpha_m_db_per_nmi", env.alpha_m);
  env.alpha_f = f.number("alpha_f_db_per_nmi_hz", env.alpha_f);
  env.sound_speed_mps = f.number("sound_speed_mps", env.sound_speed_mps);
  const std::string mode = f.text("gamma_mode", "scaled");
  if (mode == "scaled") {
    env.gamma_mode = GammaMode::Scaled;
  } else if (mode == "raw") {
    env.gamma_mode = GammaMode::Raw;
  } else {
    Fields::fail("environment.gamma_mode", "must be \"scaled\" or \"raw\"");
  }
  f.finish();
  with_prefix("environment", [&] {
    env.validate();
    return 0;
  });
  return env;
}

DetectionDesign parse_design(const json& node) {
  Fields f(node, "design");
  const double pd = f.number("pd", 0.5);
  const double pfa = f.number("pfa", 1e-4);
  const double t = f.number("t_seconds", 1.0);
  f.finish();
  return with_prefix("design", [&] { return DetectionDesign(pd, pfa, t); });
}

Region parse_region(const json& node) {
  Fields f(node, "region");
  const std::string type = f.text("type");
  Region region;
  if (type == "square") {
    region = SquareRegion{f.number("R")};
  } else if (type == "rect") {
    const auto [x_lo, x_hi] = f.interval("x");
    const auto [y_lo, y_hi] = f.interval("y");
    region = RectRegion{Rect{x_lo, x_hi, y_lo, y_hi}};
  } else if (type == "hybrid") {
    HybridRegion h;
    h.r1 = f.number("R1");
    h.r2 = f.number("R2");
    h.r3 = f.number("R3");
    if (f.has("region_b_nsl_db")) h.region_b_nsl_db = f.number("region_b_nsl_db");
    region = h;
  } else {
    Fields::fail("region.type", "must be \"square\", \"rect\" or \"hybrid\"");
  }
  f.finish();
  validate_region(region);
  return region;
}

std::vector<Sensor> parse_sensor_list(const json& node, const std::string& path) {
  if (!node.is_array()) Fields::fail(path, "must be a list");
  std::vector<Sensor> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string where = path + "[" + std::to_string(i) + "]";
    Fields f(node[i], where);
    const std::string type = f.text("type");
    if (type == "omni") {
      const Point p{f.number("x"), f.number("y")};
      f.finish();
      out.push_back(with_prefix(where, [&] { return Sensor::omni(p); }));
    } else if (type == "array") {
      const Point a{f.number("x1"), f.number("y1")};
      const Point b{f.number("x2"), f.number("y2")};
      f.finish();
      out.push_back(with_prefix(where, [&] { return Sensor::line_array(a, b); }));
    } else {
      Fields::fail(where + ".type", "must be \"omni\" or \"array\"");
    }
  }
  return out;
}

QuadratureSpec parse_quadrature(const json& node) {
  Fields f(node, "quadrature");
  QuadratureSpec q;
  q.nodes_per_axis = static_cast<int>(f.count("nodes", q.nodes_per_axis));
  const std::string scheme = f.text("scheme", "gauss_legendre");
  if (scheme == "gauss_legendre") {
    q.scheme = QuadratureSpec::Scheme::GaussLegendre;
  } else if (scheme == "midpoint") {
    q.scheme = QuadratureSpec::Scheme::Midpoint;
  } else {
    Fields::fail("quadrature.scheme", "must be \"gauss_legendre\" or \"midpoint\"");
  }
  f.finish();
  with_prefix("quadrature", [&] {
    q.validate();
    return 0;
  });
  return q;
}

MonteCarloSpec parse_monte_carlo(const json& node) {
  Fields f(node, "monte_carlo");
  MonteCarloSpec mc;
  mc.samples = f.count("samples", mc.samples);
  mc.seed = f.count("seed", mc.seed);
  f.finish();
  if (mc.samples < 1) Fields::fail("monte_carlo.samples", "must be at least 1");
  return mc;
}

OptimizeSettings parse_optimize(const json& node) {
  Fields f(node, "optimize");
  OptimizeSettings o;
  o.enabled = f.boolean("enabled", false);
  o.movable_count = f.count("movable_count", 0);
  const std::string sub = f.text("subregion", "A");
  if (sub == "A") {
    o.subregion = Subregion::A;
  } else if (sub == "B") {
    o.subregion = Subregion::B;
  } else {
    Fields::fail("optimize.subregion", "must be \"A\" or \"B\"");
  }
  if (f.has("de")) {
    Fields de(f.raw("de"), "optimize.de");
    o.de.population = de.count("population", o.de.population);
    o.de.F = de.number("F", o.de.F);
    o.de.CR = de.number("CR", o.de.CR);
    o.de.max_generations = static_cast<int>(de.count("max_generations", o.de.max_generations));
    o.de.tolerance = de.number("tolerance", o.de.tolerance);
    o.de.seed = de.count("seed", o.de.seed);
    de.finish();
  }
  f.finish();
  if (o.enabled) {
    if (o.movable_count < 1) Fields::fail("optimize.movable_count", "must be at least 1 when enabled");
    o.de.validate(2 * o.movable_count);
  }
  return o;
}

const char* scheme_name(QuadratureSpec::Scheme s) {
  return s == QuadratureSpec::Scheme::Midpoint ? "midpoint" : "gauss_legendre";
}

json sensor_list_json(const std::vector<Sensor>& sensors) {
  json out = json::array();
  for (const Sensor& s : sensors) {
    std::visit(
        [&](const auto& g) {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, OmniSensor>) {
            out.push_back({{"type", "omni"}, {"x", g.position.x}, {"y", g.position.y}});
          } else {
            out.push_back({{"type", "array"}, {"x1", g.a.x}, {"y1", g.a.y}, {"x2", g.b.x}, {"y2", g.b.y}});
          }
        },
        s.geometry());
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

ScenarioFile parse_scenario(const json& doc) {
  Fields top(doc, "");
  ScenarioFile file;
  file.description = top.text("description", "");
  Scenario& s = file.scenario;
  if (top.has("environment")) s.env = parse_environment(top.raw("environment"));
  if (top.has("design")) s.design = parse_design(top.raw("design"));
  s.region = parse_region(top.raw("region"));

  const json& sensors = top.raw("sensors");
  if (std::holds_alternative<HybridRegion>(s.region)) {
    Fields lists(sensors, "sensors");
    s.sensors = parse_sensor_list(lists.raw("region_a"), "sensors.region_a");
    s.sensors_b = parse_sensor_list(lists.raw("region_b"), "sensors.region_b");
    lists.finish();
  } else {
    s.sensors = parse_sensor_list(sensors, "sensors");
  }

  if (top.has("quadrature")) file.quadrature = parse_quadrature(top.raw("quadrature"));
  if (top.has("monte_carlo")) file.monte_carlo = parse_monte_carlo(top.raw("monte_carlo"));
  if (top.has("optimize")) file.optimize = parse_optimize(top.raw("optimize"));
  top.finish();

  s.validate();
  if (!file.optimize.enabled) {
    const bool hybrid = std::holds_alternative<HybridRegion>(s.region);
    if (s.sensors.empty()) Fields::fail(hybrid ? "sensors.region_a" : "sensors", "at least one sensor is required");
    if (hybrid && s.sensors_b.empty()) Fields::fail("sensors.region_b", "at least one sensor is required");
  } else if (file.optimize.subregion == Subregion::B && !std::holds_alternative<HybridRegion>(s.region)) {
    Fields::fail("optimize.subregion", "B requires a hybrid region");
  }
  return file;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open scenario file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

json to_json(const ScenarioFile& file) {
  const Scenario& s = file.scenario;
  json doc;
  if (!file.description.empty()) doc["description"] = file.description;
  doc["environment"] = {
      {"f_m_hz", s.env.f_m_hz},
      {"bandwidth_hz", s.env.bandwidth_hz},
      {"ssl_db", s.env.ssl_db},
      {"nsl_db", s.env.nsl_db},
      {"alpha_m_db_per_nmi", s.env.alpha_m},
      {"alpha_f_db_per_nmi_hz", s.env.alpha_f},
      {"sound_speed_mps", s.env.sound_speed_mps},
      {"gamma_mode", s.env.gamma_mode == GammaMode::Raw ? "raw" : "scaled"},
  };
  doc["design"] = {{"pd", s.design.pd_req()}, {"pfa", s.design.pfa_req()}, {"t_seconds", s.design.t_seconds()}};
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, SquareRegion>) {
          doc["region"] = {{"type", "square"}, {"R", r.side}};
        } else if constexpr (std::is_same_v<T, RectRegion>) {
          doc["region"] = {{"type", "rect"},
                           {"x", {r.extent.x_lo, r.extent.x_hi}},
                           {"y", {r.extent.y_lo, r.extent.y_hi}}};
        } else {
          doc["region"] = {{"type", "hybrid"}, {"R1", r.r1}, {"R2", r.r2}, {"R3", r.r3}};
          if (r.region_b_nsl_db) doc["region"]["region_b_nsl_db"] = *r.region_b_nsl_db;
        }
      },
      s.region);
  if (std::holds_alternative<HybridRegion>(s.region)) {
    doc["sensors"] = {{"region_a", sensor_list_json(s.sensors)}, {"region_b", sensor_list_json(s.sensors_b)}};
  } else {
    doc["sensors"] = sensor_list_json(s.sensors);
  }
  doc["quadrature"] = {{"nodes", file.quadrature.nodes_per_axis}, {"scheme", scheme_name(file.quadrature.scheme)}};
  doc["monte_carlo"] = {{"samples", file.monte_carlo.samples}, {"seed", file.monte_carlo.seed}};
  const OptimizeSettings& o = file.optimize;
  doc["optimize"] = {
      {"enabled", o.enabled},
      {"movable_count", o.movable_count},
      {"subregion", o.subregion == Subregion::A ? "A" : "B"},
      {"de",
       {{"population", o.de.population},
        {"F", o.de.F},
        {"CR", o.de.CR},
        {"max_generations", o.de.max_generations},
        {"tolerance", o.de.tolerance},
        {"seed", o.de.seed}}},
  };
  return doc;
}

void write_scenario(const ScenarioFile& file, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path.string() + ": cannot open for writing");
  out << to_json(file).dump(2) << '\n';
}

void SweepSpec::validate() const {
  if (param != "R" && param != "R2" && param != "ssl_db" && param != "nsl_db") {
    throw ValidationError("sweep.param: must be one of R, R2, ssl_db, nsl_db");
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw ValidationError("sweep.range: require lo < hi");
  if (steps < 2) throw ValidationError("sweep.steps: must be at least 2");
}

double SweepSpec::value(int step) const {
  if (step == steps - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(step) / static_cast<double>(steps - 1);
}

Scenario apply_parameter(const Scenario& scenario, const std::string& param, double value) {
  Scenario s = scenario;
  if (param == "ssl_db") {
    s.env.ssl_db = value;
  } else if (param == "nsl_db") {
    s.env.nsl_db = value;
  } else if (param == "R") {
    auto* sq = std::get_if<SquareRegion>(&s.region);
    if (!sq) throw ValidationError("sweep.param: R applies to square regions only");
    const double scale = value / sq->side;
    sq->side = value;
    for (Sensor& sensor : s.sensors) {
      sensor = std::visit(
          [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, OmniSensor>) {
              return Sensor::omni(Point{g.position.x * scale, g.position.y * scale});
            } else {
              return Sensor::line_array(Point{g.a.x * scale, g.a.y * scale}, Point{g.b.x * scale, g.b.y * scale});
            }
          },
          sensor.geometry());
    }
  } else if (param == "R2") {
    auto* rect = std::get_if<RectRegion>(&s.region);
    if (!rect) throw ValidationError("sweep.param: R2 applies to rectangular regions only");
    rect->extent.y_hi = rect->extent.y_lo + value;
  } else {
    throw ValidationError("sweep.param: unknown parameter " + param);
  }
  s.validate();
  return s;
}

std::vector<std::pair<double, double>> run_sweep(const ScenarioFile& file, const SweepSpec& sweep) {
  sweep.validate();
  std::vector<std::pair<double, double>> rows;
  rows.reserve(sweep.steps);
  for (int k = 0; k < sweep.steps; ++k) {
    const double v = sweep.value(k);
    rows.emplace_back(v, system_pd(apply_parameter(file.scenario, sweep.param, v), file.quadrature));
  }
  return rows;
}

std::string format_sweep_csv(const std::vector<std::pair<double, double>>& rows) {
  std::string out = "param,pd\n";
  for (const auto& [param, pd] : rows) out += format_number(param) + "," + format_number(pd) + "\n";
  return out;
}

void emit_sweep_csv(const ScenarioFile& file, const SweepSpec& sweep, const std::filesystem::path& path) {
  const std::string csv = format_sweep_csv(run_sweep(file, sweep));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path.string() + ": cannot open for writing");
  out << csv;
}

json derived_block(const Scenario& scenario) {
  json d;
  d["gamma_db"] = gamma_constant(scenario.env).value;
  d["dt_db"] = scenario.design.threshold().value;
  d["d"] = scenario.design.index();
  json di = json::array();
  for (const Sensor& s : scenario.sensors) {
    if (s.is_line_array()) di.push_back(sensor_di(s, scenario.env).value);
  }
  if (const auto* h = std::get_if<HybridRegion>(&scenario.region)) {
    const SonarEnvironment env_b = region_b_environment(scenario);
    for (const Sensor& s : scenario.sensors_b) {
      if (s.is_line_array()) di.push_back(sensor_di(s, env_b).value);
    }
    d["region_b_gamma_db"] = gamma_constant(env_b).value;
    const RegionPrior prior = region_prior_prob(*h);
    d["region_prior"] = {{"a", prior.a}, {"b", prior.b}};
  }
  if (!di.empty()) d["di_db"] = di;
  return d;
}

PlacementProblem placement_problem(const ScenarioFile& file) {
  Scenario fixed = file.scenario;
  auto& list = file.optimize.subregion == Subregion::A ? fixed.sensors : fixed.sensors_b;
  std::size_t dropped = 0;
  std::erase_if(list, [&](const Sensor& s) {
    if (dropped == file.optimize.movable_count || !s.is_omni()) return false;
    ++dropped;
    return true;
  });
  return PlacementProblem(std::move(fixed), file.optimize.movable_count, file.quadrature, file.optimize.subregion);
}

json placement_block(const PlacementResult& result) {
  json positions = json::array();
  for (const Point& p : result.best_positions()) positions.push_back({p.x, p.y});
  return {
      {"best_positions", positions},
      {"best_pd", result.best_pd},
      {"generations", result.generations},
      {"evaluations", result.evaluations},
      {"history", result.history},
  };
}

}  // namespace sonarfield
