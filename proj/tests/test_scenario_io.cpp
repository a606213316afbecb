#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sonarfield/errors.h"
#include "sonarfield/scenario_io.h"

using namespace sonarfield;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = SONARFIELD_SCENARIO_DIR;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sonarfield_test_scenario_io";
  fs::create_directories(dir);
  return dir / name;
}

json minimal() {
  return json::parse(R"({"region": {"type": "square", "R": 0.4}, "sensors": [{"type": "omni", "x": 0.2, "y": 0.2}]})");
}

std::string rejection(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Random valid scenario file covering every region kind and optional block.
ScenarioFile random_file(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScenarioFile f;
  f.description = u(rng) < 0.5 ? "" : "random " + std::to_string(rng() % 1000);
  SonarEnvironment& e = f.scenario.env;
  e.bandwidth_hz = 5.0 + 50.0 * u(rng);
  // lower band edge >= 50 Hz keeps the array gain threshold under 0.28 nmi
  e.f_m_hz = e.bandwidth_hz / 2.0 + 50.0 + 200.0 * u(rng);
  e.ssl_db = 100.0 + 60.0 * u(rng);
  e.nsl_db = 40.0 + 60.0 * u(rng);
  e.alpha_m = 10.0 + 40.0 * u(rng);
  e.alpha_f = (u(rng) - 0.5) * 2.0 * e.alpha_m / e.bandwidth_hz;
  e.sound_speed_mps = 1400.0 + 200.0 * u(rng);
  e.gamma_mode = u(rng) < 0.5 ? GammaMode::Scaled : GammaMode::Raw;
  f.scenario.design = DetectionDesign(0.3 + 0.6 * u(rng), std::pow(10.0, -2.0 - 4.0 * u(rng)), 0.5 + 3.0 * u(rng));

  auto omni_in = [&](const Rect& r) { return Sensor::omni({r.x_lo + r.width() * u(rng), r.y_lo + r.height() * u(rng)}); };
  auto array_in = [&](const Rect& r) {
    const double y = r.y_lo + r.height() * u(rng);
    return Sensor::line_array({r.x_lo, y}, {r.x_hi, y});
  };
  const int kind = static_cast<int>(rng() % 3);
  if (kind == 0) {
    const double side = 0.5 + u(rng);
    f.scenario.region = SquareRegion{side};
    const Rect box{0.0, side, 0.0, side};
    for (int k = 0, n = 1 + static_cast<int>(rng() % 5); k < n; ++k) f.scenario.sensors.push_back(omni_in(box));
    if (u(rng) < 0.5) f.scenario.sensors.push_back(array_in(box));
  } else if (kind == 1) {
    const Rect box{-0.5 * u(rng), 0.5 + u(rng), 0.1 * u(rng), 0.3 + u(rng)};
    f.scenario.region = RectRegion{box};
    f.scenario.sensors.push_back(array_in(box));
    if (u(rng) < 0.5) f.scenario.sensors.push_back(omni_in(box));
  } else {
    HybridRegion h{0.2 + u(rng), 0.2 + u(rng), 0.0, std::nullopt};
    h.r3 = h.r1 + 0.5 + u(rng);
    if (u(rng) < 0.5) h.region_b_nsl_db = 60.0 + 40.0 * u(rng);
    f.scenario.region = h;
    f.scenario.sensors.push_back(omni_in(h.region_a()));
    f.scenario.sensors_b.push_back(array_in(h.region_b()));
  }
  f.quadrature.nodes_per_axis = 8 + static_cast<int>(rng() % 200);
  f.quadrature.scheme = u(rng) < 0.5 ? QuadratureSpec::Scheme::GaussLegendre : QuadratureSpec::Scheme::Midpoint;
  f.monte_carlo.samples = 1 + rng() % 5000000;
  f.monte_carlo.seed = rng();
  if (u(rng) < 0.5) {
    f.optimize.enabled = true;
    f.optimize.movable_count = 1 + rng() % 6;
    f.optimize.subregion = kind == 2 && u(rng) < 0.5 ? Subregion::B : Subregion::A;
    f.optimize.de.population = u(rng) < 0.5 ? 0 : 4 + rng() % 100;
    f.optimize.de.F = 0.1 + 1.9 * u(rng);
    f.optimize.de.CR = u(rng);
    f.optimize.de.max_generations = static_cast<int>(rng() % 1000);
    f.optimize.de.tolerance = 1e-8 * u(rng);
    f.optimize.de.seed = rng();
  }
  return f;
}

}  // namespace

TEST_CASE("minimal file takes the study defaults") {
  const ScenarioFile f = parse_scenario(minimal());
  CHECK(f.scenario.env == SonarEnvironment{});
  CHECK(f.scenario.env.f_m_hz == 100.0);
  CHECK(f.scenario.env.bandwidth_hz == 30.0);
  CHECK(f.scenario.env.ssl_db == 133.0);
  CHECK(f.scenario.env.nsl_db == 68.5);
  CHECK(f.scenario.env.gamma_mode == GammaMode::Scaled);
  CHECK(f.scenario.design == DetectionDesign(0.5, 1e-4, 1.0));
  CHECK(f.quadrature == QuadratureSpec{});
  CHECK_FALSE(f.optimize.enabled);
  REQUIRE(f.scenario.sensors.size() == 1);
  CHECK(range_to(f.scenario.sensors[0], {0.2, 0.2}) == 0.0);
}

TEST_CASE("schema violations name the offending field") {
  json doc = minimal();
  doc["environment"]["nsl_db"] = -5.0;
  CHECK(rejection(doc).rfind("environment.nsl_db", 0) == 0);

  doc = minimal();
  doc["environment"]["nsl"] = 60.0;
  CHECK(rejection(doc) == "environment.nsl: unknown key");

  doc = minimal();
  doc["colour"] = "blue";
  CHECK(rejection(doc) == "colour: unknown key");

  doc = minimal();
  doc["sensors"][0]["z"] = 0.0;
  CHECK(rejection(doc) == "sensors[0].z: unknown key");

  doc = minimal();
  doc["sensors"][0]["x"] = 0.5;
  CHECK_FALSE(rejection(doc).empty());

  doc = minimal();
  doc["sensors"] = json::array();
  CHECK(rejection(doc) == "sensors: at least one sensor is required");

  doc = minimal();
  doc["region"]["type"] = "circle";
  CHECK(rejection(doc).rfind("region.type", 0) == 0);

  doc = minimal();
  doc["design"]["pfa"] = 1.5;
  CHECK(rejection(doc).rfind("design.pfa", 0) == 0);

  doc = minimal();
  doc["quadrature"]["nodes"] = -3;
  CHECK(rejection(doc).rfind("quadrature.nodes", 0) == 0);

  doc = minimal();
  doc["sensors"] = json::array({{{"type", "array"}, {"x1", 0.1}, {"y1", 0.1}, {"x2", 0.12}, {"y2", 0.1}}});
  CHECK_FALSE(rejection(doc).empty());

  doc = minimal();
  doc["optimize"] = {{"enabled", true}, {"movable_count", 1}, {"de", {{"population", 3}}}};
  CHECK(rejection(doc).rfind("optimize.de.population", 0) == 0);

  CHECK_THROWS_AS(load_scenario(kScenarios / "does_not_exist.json"), ValidationError);
  std::ofstream(scratch("broken.json")) << "{\"region\": ";
  CHECK_THROWS_AS(load_scenario(scratch("broken.json")), ValidationError);
}

TEST_CASE("hybrid study file") {
  const ScenarioFile f = load_scenario(kScenarios / "fig8_hybrid_uniform.json");
  const auto& h = std::get<HybridRegion>(f.scenario.region);
  const RegionPrior prior = region_prior_prob(h);
  CHECK(prior.a == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
  CHECK(prior.b == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
  CHECK(f.scenario.sensors.size() == 4);
  CHECK(f.scenario.sensors_b.size() == 1);
  CHECK_FALSE(h.region_b_nsl_db.has_value());

  const ScenarioFile noisy = load_scenario(kScenarios / "fig8_hybrid_noisy.json");
  CHECK(std::get<HybridRegion>(noisy.scenario.region).region_b_nsl_db.value() > f.scenario.env.nsl_db);

  json doc = to_json(f);
  doc["sensors"] = doc["sensors"]["region_a"];
  CHECK(rejection(doc).rfind("sensors", 0) == 0);
}

TEST_CASE("every bundled scenario loads and round-trips") {
  for (const char* name : {"fig2_single.json", "fig4_foursensor.json", "table1_r06.json", "fig7_array.json",
                           "fig8_hybrid_uniform.json", "fig8_hybrid_noisy.json"}) {
    CAPTURE(name);
    const ScenarioFile f = load_scenario(kScenarios / name);
    CHECK(parse_scenario(to_json(f)) == f);
  }
}

TEST_CASE("write then load reproduces randomized scenarios") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const ScenarioFile f = random_file(rng);
    const fs::path p = scratch("round_trip.json");
    write_scenario(f, p);
    const ScenarioFile back = load_scenario(p);
    REQUIRE(back == f);
  }
}

TEST_CASE("sweep specs") {
  SweepSpec s{"R", 0.05, 1.0, 40};
  CHECK_NOTHROW(s.validate());
  CHECK(s.value(0) == 0.05);
  CHECK(s.value(39) == 1.0);
  CHECK(s.value(1) == doctest::Approx(0.05 + 0.95 / 39.0));
  CHECK_THROWS_AS((SweepSpec{"R", 1.0, 0.5, 5}.validate()), ValidationError);
  CHECK_THROWS_AS((SweepSpec{"R", 0.5, 1.0, 1}.validate()), ValidationError);
  CHECK_THROWS_AS((SweepSpec{"depth", 0.5, 1.0, 5}.validate()), ValidationError);

  const ScenarioFile square = load_scenario(kScenarios / "fig4_foursensor.json");
  CHECK_THROWS_AS(apply_parameter(square.scenario, "R2", 0.3), ValidationError);
  const ScenarioFile rect = load_scenario(kScenarios / "fig7_array.json");
  CHECK_THROWS_AS(apply_parameter(rect.scenario, "R", 0.3), ValidationError);
  const ScenarioFile hybrid = load_scenario(kScenarios / "fig8_hybrid_uniform.json");
  CHECK_THROWS_AS(run_sweep(hybrid, SweepSpec{"R", 0.2, 0.4, 3}), ValidationError);

  const Scenario scaled = apply_parameter(square.scenario, "R", 0.8);
  CHECK(std::get<SquareRegion>(scaled.region).side == 0.8);
  CHECK(range_to(scaled.sensors[3], {0.6, 0.6}) < 1e-15);
  const Scenario taller = apply_parameter(rect.scenario, "R2", 0.5);
  CHECK(std::get<RectRegion>(taller.region).extent.height() == 0.5);
}

TEST_CASE("csv formatting") {
  const std::vector<std::pair<double, double>> rows{{0.05, 1.0}, {0.1, 0.98765432}, {1e-7, 1.0 / 3.0}};
  CHECK(format_sweep_csv(rows) == "param,pd\n0.05,1\n0.1,0.987654\n1e-07,0.333333\n");
}

TEST_CASE("single centred sensor: Pd falls as the square grows") {
  ScenarioFile f = load_scenario(kScenarios / "fig2_single.json");
  f.quadrature.nodes_per_axis = 64;
  const SweepSpec sweep{"R", 0.05, 1.0, 40};
  const fs::path a = scratch("fig2_a.csv");
  const fs::path b = scratch("fig2_b.csv");
  emit_sweep_csv(f, sweep, a);
  emit_sweep_csv(f, sweep, b);
  const std::string csv = slurp(a);
  CHECK(csv == slurp(b));
  CHECK(csv.find('\r') == std::string::npos);

  const auto rows = run_sweep(f, sweep);
  REQUIRE(rows.size() == 40);
  CHECK(rows.front().second == 1.0);
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].second <= rows[k - 1].second);
  CHECK(rows.back().second < 0.1);
}

TEST_CASE("four sensors: Pd rises with source level") {
  ScenarioFile f = load_scenario(kScenarios / "fig4_foursensor.json");
  f.quadrature.nodes_per_axis = 64;
  const auto rows = run_sweep(f, SweepSpec{"ssl_db", 100.0, 150.0, 26});
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].second >= rows[k - 1].second);
  CHECK(rows.front().second < 0.7);
  CHECK(rows.back().second == 1.0);
}

TEST_CASE("four sensors: Pd falls with noise level") {
  ScenarioFile f = load_scenario(kScenarios / "fig4_foursensor.json");
  f.quadrature.nodes_per_axis = 64;
  const auto rows = run_sweep(f, SweepSpec{"nsl_db", 50.0, 100.0, 51});
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].second <= rows[k - 1].second);
  // Certain detection holds up to 72 dB; the 75 dB end of that claim is
  // checked by the acceptance suite.
  for (const auto& [nsl, pd] : rows) {
    if (nsl <= 72.0) CHECK(pd >= 0.99);
  }
}

TEST_CASE("placement from a scenario file frees the listed omni sensors") {
  ScenarioFile f = load_scenario(kScenarios / "table1_r06.json");
  const PlacementProblem p = placement_problem(f);
  CHECK(p.movable_count() == 8);
  CHECK(p.scenario_template().sensors.empty());

  f.optimize.movable_count = 3;
  const PlacementProblem partial = placement_problem(f);
  CHECK(partial.scenario_template().sensors.size() == 5);

  ScenarioFile h = load_scenario(kScenarios / "fig8_hybrid_uniform.json");
  h.optimize.enabled = true;
  h.optimize.movable_count = 2;
  h.optimize.subregion = Subregion::B;
  const PlacementProblem in_b = placement_problem(h);
  CHECK(in_b.scenario_template().sensors_b.size() == 1);  // the array stays fixed
  CHECK(in_b.scenario_template().sensors.size() == 4);
  CHECK(in_b.bounds()[0].lo == 0.4);
  CHECK(in_b.bounds()[0].hi == 1.4);
}
