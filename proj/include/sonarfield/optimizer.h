#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sonarfield/detection.h"

namespace sonarfield {

struct Bounds {
  double lo;
  double hi;
};

/// DE/rand/1/bin settings. population == 0 selects 15 * dimension.
struct DEConfig {
  std::size_t population = 0;
  double F = 0.7;
  double CR = 0.9;
  int max_generations = 300;
  double tolerance = 1e-6;  // stop once max - min of population objectives falls below this
  std::uint64_t seed = 0;

  std::size_t population_for(std::size_t dimension) const { return population ? population : 15 * dimension; }
  void validate(std::size_t dimension) const;
  friend bool operator==(const DEConfig&, const DEConfig&) = default;
};

struct DEResult {
  std::vector<double> best;
  double best_value = 0.0;
  std::vector<double> history;  // best objective after each generation, generation 0 = initial population
  std::size_t evaluations = 0;
  int generations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Minimizes `objective` over the box `bounds` with DE/rand/1/bin.
/// Trial vectors are generated serially from the seed, evaluated in parallel
/// and selected serially, so results do not depend on the worker count.
DEResult differential_evolution(const Objective& objective, std::span<const Bounds> bounds, const DEConfig& config);

/// Which hybrid subregion receives the movable sensors.
enum class Subregion { A, B };

/// Maximize system Pd over the (x, y) positions of `movable_count` omni
/// sensors added to a template scenario. Sensors already in the template stay
/// fixed. The decision vector is x0, y0, x1, y1, ...
class PlacementProblem {
 public:
  PlacementProblem(Scenario scenario_template, std::size_t movable_count, QuadratureSpec quad = {},
                   Subregion target = Subregion::A);

  std::size_t dimension() const { return 2 * movable_; }
  std::size_t movable_count() const { return movable_; }
  const std::vector<Bounds>& bounds() const { return bounds_; }
  const Scenario& scenario_template() const { return template_; }
  const QuadratureSpec& quadrature() const { return quad_; }

  /// Copy of the vector projected onto the bounds.
  std::vector<double> clamp(std::span<const double> vector) const;
  /// Template plus movable sensors at the (clamped) vector positions.
  Scenario instantiate(std::span<const double> vector) const;
  /// 1 - system Pd of the instantiated scenario.
  double objective(std::span<const double> vector) const;

 private:
  Scenario template_;
  std::size_t movable_;
  QuadratureSpec quad_;
  Subregion target_;
  std::vector<Bounds> bounds_;
};

struct PlacementResult {
  std::vector<double> best_vector;
  double best_pd = 0.0;
  std::vector<double> history;
  std::size_t evaluations = 0;
  int generations = 0;

  std::vector<Point> best_positions() const;
};

PlacementResult optimize(const PlacementProblem& problem, const DEConfig& config);

}  // namespace sonarfield
