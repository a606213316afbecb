#include "sonarfield/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "sonarfield/errors.h"
#include "sonarfield/scenario_io.h"

namespace sonarfield::cli {

using nlohmann::json;

namespace {

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("--range: expected lo:hi");
  try {
    std::size_t used_lo = 0;
    std::size_t used_hi = 0;
    const std::string lo_text = text.substr(0, colon);
    const std::string hi_text = text.substr(colon + 1);
    const double lo = std::stod(lo_text, &used_lo);
    const double hi = std::stod(hi_text, &used_hi);
    if (used_lo != lo_text.size() || used_hi != hi_text.size()) throw std::invalid_argument("trailing text");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw ValidationError("--range: expected lo:hi with numeric bounds, got " + text);
  }
}

void write_json(const json& doc, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError(path + ": cannot open for writing");
  file << doc.dump(2) << '\n';
}

json evaluation_result(const ScenarioFile& file, double pd) {
  return {{"scenario_echo", to_json(file)}, {"derived", derived_block(file.scenario)}, {"pd", pd}};
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalError(std::string(what) + " is not finite");
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Passive sonar sensor placement: detection probability evaluation and optimization", "sonarfield"};
  app.require_subcommand(1, 1);

  std::string scenario_path;
  std::string out_path;

  auto* evaluate = app.add_subcommand("evaluate", "System detection probability by quadrature");
  evaluate->add_option("scenario", scenario_path, "Scenario JSON")->required();
  evaluate->add_option("--out", out_path, "Also write the result JSON here");

  std::string param;
  std::string range_text;
  int steps = 0;
  auto* sweep = app.add_subcommand("sweep", "Detection probability over a parameter range, as CSV");
  sweep->add_option("scenario", scenario_path, "Scenario JSON")->required();
  sweep->add_option("--param", param, "R | R2 | ssl_db | nsl_db")->required();
  sweep->add_option("--range", range_text, "lo:hi")->required();
  sweep->add_option("--steps", steps, "Number of points (>= 2)")->required();
  sweep->add_option("--out", out_path, "CSV output path")->required();

  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
  auto* validate = app.add_subcommand("validate", "Cross-check quadrature against Monte Carlo");
  validate->add_option("scenario", scenario_path, "Scenario JSON")->required();
  validate->add_option("--samples", samples, "Monte Carlo samples (default from scenario)");
  validate->add_option("--seed", seed, "Monte Carlo seed (default from scenario)");

  auto* optimize = app.add_subcommand("optimize", "Differential-evolution sensor placement");
  optimize->add_option("scenario", scenario_path, "Scenario JSON")->required();
  optimize->add_option("--out", out_path, "Result JSON path")->required();

  auto* derive = app.add_subcommand("derive", "Print the derived sonar constants");
  derive->add_option("scenario", scenario_path, "Scenario JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }

  try {
    if (sweep->parsed()) {
      SweepSpec spec;
      spec.param = param;
      std::tie(spec.lo, spec.hi) = parse_range(range_text);
      spec.steps = steps;
      spec.validate();
      const ScenarioFile file = load_scenario(scenario_path);
      emit_sweep_csv(file, spec, out_path);
      return kOk;
    }

    const ScenarioFile file = load_scenario(scenario_path);

    if (evaluate->parsed()) {
      const double pd = system_pd(file.scenario, file.quadrature);
      require_finite(pd, "pd");
      const json result = evaluation_result(file, pd);
      if (!out_path.empty()) write_json(result, out_path);
      out << result.dump(2) << '\n';
      return kOk;
    }

    if (validate->parsed()) {
      MonteCarloSpec mc = file.monte_carlo;
      if (samples) mc.samples = *samples;
      if (seed) mc.seed = *seed;
      if (mc.samples < 1) throw ValidationError("--samples: must be at least 1");
      const double pd = system_pd(file.scenario, file.quadrature);
      const MonteCarloEstimate est = system_pd_monte_carlo(file.scenario, mc);
      require_finite(pd, "pd");
      require_finite(est.estimate, "Monte Carlo estimate");
      const double tolerance = std::max(3.0 * est.std_error, 1e-3);
      const bool agree = std::abs(pd - est.estimate) <= tolerance;
      const json result = {
          {"pd", pd},
          {"mc", {{"estimate", est.estimate}, {"std_error", est.std_error}, {"samples", mc.samples}, {"seed", mc.seed}}},
          {"tolerance", tolerance},
          {"agree", agree},
      };
      out << result.dump(2) << '\n';
      if (!agree) {
        err << "error: quadrature and Monte Carlo disagree by " << std::abs(pd - est.estimate) << " (tolerance "
            << tolerance << ")\n";
        return kNumericalFailure;
      }
      return kOk;
    }

    if (optimize->parsed()) {
      if (!file.optimize.enabled) throw ValidationError("optimize.enabled: must be true for the optimize command");
      const PlacementProblem problem = placement_problem(file);
      const PlacementResult placed = sonarfield::optimize(problem, file.optimize.de);
      require_finite(placed.best_pd, "best pd");
      json result = evaluation_result(file, placed.best_pd);
      result["derived"] = derived_block(problem.instantiate(placed.best_vector));
      result["optimize"] = placement_block(placed);
      write_json(result, out_path);
      out << "best_pd = " << fixed(placed.best_pd) << " after " << placed.generations << " generations ("
          << placed.evaluations << " evaluations)\n";
      return kOk;
    }

    if (derive->parsed()) {
      const json d = derived_block(file.scenario);
      for (const char* key : {"gamma_db", "dt_db", "d"}) out << key << " = " << fixed(d[key].get<double>()) << '\n';
      if (d.contains("region_b_gamma_db")) out << "region_b_gamma_db = " << fixed(d["region_b_gamma_db"].get<double>()) << '\n';
      if (d.contains("di_db")) {
        for (const auto& v : d["di_db"]) out << "di_db = " << fixed(v.get<double>()) << '\n';
      }
      return kOk;
    }
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kValidationError;
}

}  // namespace sonarfield::cli
