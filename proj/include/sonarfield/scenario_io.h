#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sonarfield/detection.h"
#include "sonarfield/optimizer.h"

namespace sonarfield {

struct OptimizeSettings {
  bool enabled = false;
  std::size_t movable_count = 0;
  Subregion subregion = Subregion::A;
  DEConfig de;
  friend bool operator==(const OptimizeSettings&, const OptimizeSettings&) = default;
};

/// Everything a scenario file carries.
struct ScenarioFile {
  std::string description;
  Scenario scenario;
  QuadratureSpec quadrature;
  MonteCarloSpec monte_carlo;
  OptimizeSettings optimize;
  friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

/// Parses and validates a scenario document. Omitted optional fields take the
/// study defaults (100 Hz centre, 30 Hz band, SSL 133 dB, NSL 68.5 dB, ...).
/// Unknown keys are rejected. Errors are ValidationError with a dotted field path.
ScenarioFile parse_scenario(const nlohmann::json& doc);
ScenarioFile load_scenario(const std::filesystem::path& path);

nlohmann::json to_json(const ScenarioFile& file);
void write_scenario(const ScenarioFile& file, const std::filesystem::path& path);

struct SweepSpec {
  std::string param;  // R | R2 | ssl_db | nsl_db
  double lo = 0.0;
  double hi = 0.0;
  int steps = 2;

  void validate() const;
  double value(int step) const;
};

/// Scenario with one sweep parameter set. R rescales the square together with
/// every sensor; R2 sets the height of a rectangle; ssl_db and nsl_db set the
/// environment levels. Inapplicable parameters throw ValidationError.
Scenario apply_parameter(const Scenario& scenario, const std::string& param, double value);

std::vector<std::pair<double, double>> run_sweep(const ScenarioFile& file, const SweepSpec& sweep);

/// "param,pd" header then one row per step, 6 significant digits, LF endings.
std::string format_sweep_csv(const std::vector<std::pair<double, double>>& rows);
void emit_sweep_csv(const ScenarioFile& file, const SweepSpec& sweep, const std::filesystem::path& path);

/// gamma_db, dt_db, d, plus di_db (one per line array) and region-B values when present.
nlohmann::json derived_block(const Scenario& scenario);

/// Placement problem described by the file's optimize block. The first
/// movable_count omni sensors of the target subregion are the movable ones;
/// every other listed sensor stays fixed.
PlacementProblem placement_problem(const ScenarioFile& file);

nlohmann::json placement_block(const PlacementResult& result);

}  // namespace sonarfield
