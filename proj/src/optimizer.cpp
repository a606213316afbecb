#include "sonarfield/optimizer.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "sonarfield/errors.h"
#include "sonarfield/parallel.h"

namespace sonarfield {

void DEConfig::validate(std::size_t dimension) const {
  if (dimension == 0) throw ValidationError("optimize: nothing to optimize (dimension 0)");
  if (population_for(dimension) < 4) throw ValidationError("optimize.de.population: must be at least 4");
  if (!(F > 0.0 && F <= 2.0)) throw ValidationError("optimize.de.F: must lie in (0, 2]");
  if (!(CR >= 0.0 && CR <= 1.0)) throw ValidationError("optimize.de.CR: must lie in [0, 1]");
  if (max_generations < 0) throw ValidationError("optimize.de.max_generations: must be non-negative");
  if (!(tolerance >= 0.0)) throw ValidationError("optimize.de.tolerance: must be non-negative");
}

namespace {

double evaluate_checked(const Objective& objective, std::span<const double> v) {
  const double f = objective(v);
  if (std::isnan(f)) throw NumericalError("optimize: objective returned NaN");
  return f;
}

}  // namespace

DEResult differential_evolution(const Objective& objective, std::span<const Bounds> bounds, const DEConfig& config) {
  const std::size_t dim = bounds.size();
  config.validate(dim);
  for (const Bounds& b : bounds) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo > b.hi) {
      throw ValidationError("optimize: bounds must be finite with lo <= hi");
    }
  }
  const std::size_t np = config.population_for(dim);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_member(0, np - 1);
  std::uniform_int_distribution<std::size_t> pick_gene(0, dim - 1);

  std::vector<std::vector<double>> population(np, std::vector<double>(dim));
  for (auto& member : population) {
    for (std::size_t j = 0; j < dim; ++j) member[j] = bounds[j].lo + unit(rng) * (bounds[j].hi - bounds[j].lo);
  }
  std::vector<double> fitness(np);
  parallel_for(np, [&](std::size_t i) { fitness[i] = evaluate_checked(objective, population[i]); });

  DEResult result;
  result.evaluations = np;
  auto best_index = [&] { return static_cast<std::size_t>(std::min_element(fitness.begin(), fitness.end()) - fitness.begin()); };
  std::size_t best = best_index();
  result.history.push_back(fitness[best]);

  std::vector<std::vector<double>> trials(np, std::vector<double>(dim));
  std::vector<double> trial_fitness(np);
  for (int gen = 1; gen <= config.max_generations; ++gen) {
    const auto [lo_it, hi_it] = std::minmax_element(fitness.begin(), fitness.end());
    if (*hi_it - *lo_it < config.tolerance) break;

    for (std::size_t i = 0; i < np; ++i) {
      std::size_t a, b, c;
      do a = pick_member(rng); while (a == i);
      do b = pick_member(rng); while (b == i || b == a);
      do c = pick_member(rng); while (c == i || c == a || c == b);
      const std::size_t forced = pick_gene(rng);
      std::vector<double>& trial = trials[i];
      for (std::size_t j = 0; j < dim; ++j) {
        const bool cross = unit(rng) < config.CR || j == forced;
        double v = population[i][j];
        if (cross) v = population[a][j] + config.F * (population[b][j] - population[c][j]);
        trial[j] = std::clamp(v, bounds[j].lo, bounds[j].hi);
      }
    }
    parallel_for(np, [&](std::size_t i) { trial_fitness[i] = evaluate_checked(objective, trials[i]); });
    result.evaluations += np;

    for (std::size_t i = 0; i < np; ++i) {
      if (trial_fitness[i] <= fitness[i]) {
        population[i] = trials[i];
        fitness[i] = trial_fitness[i];
      }
    }
    best = best_index();
    result.history.push_back(fitness[best]);
    result.generations = gen;
  }

  result.best = population[best];
  result.best_value = fitness[best];
  return result;
}

PlacementProblem::PlacementProblem(Scenario scenario_template, std::size_t movable_count, QuadratureSpec quad,
                                   Subregion target)
    : template_(std::move(scenario_template)), movable_(movable_count), quad_(quad), target_(target) {
  template_.validate();
  quad_.validate();
  if (movable_ == 0) throw ValidationError("optimize.movable_count: must be at least 1");
  Rect box;
  if (const auto* h = std::get_if<HybridRegion>(&template_.region)) {
    box = target_ == Subregion::A ? h->region_a() : h->region_b();
  } else {
    if (target_ == Subregion::B) throw ValidationError("optimize.subregion: B requires a hybrid region");
    box = std::holds_alternative<SquareRegion>(template_.region) ? std::get<SquareRegion>(template_.region).bounds()
                                                                  : std::get<RectRegion>(template_.region).bounds();
  }
  bounds_.reserve(2 * movable_);
  for (std::size_t k = 0; k < movable_; ++k) {
    bounds_.push_back({box.x_lo, box.x_hi});
    bounds_.push_back({box.y_lo, box.y_hi});
  }
}

std::vector<double> PlacementProblem::clamp(std::span<const double> vector) const {
  if (vector.size() != bounds_.size()) {
    throw ValidationError("optimize: decision vector has length " + std::to_string(vector.size()) + ", expected " +
                          std::to_string(bounds_.size()));
  }
  std::vector<double> out(vector.begin(), vector.end());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::clamp(out[j], bounds_[j].lo, bounds_[j].hi);
  return out;
}

Scenario PlacementProblem::instantiate(std::span<const double> vector) const {
  const std::vector<double> v = clamp(vector);
  Scenario s = template_;
  std::vector<Sensor>& dest = (target_ == Subregion::A) ? s.sensors : s.sensors_b;
  for (std::size_t k = 0; k < movable_; ++k) dest.push_back(Sensor::omni(Point{v[2 * k], v[2 * k + 1]}));
  return s;
}

double PlacementProblem::objective(std::span<const double> vector) const {
  return 1.0 - system_pd(instantiate(vector), quad_);
}

std::vector<Point> PlacementResult::best_positions() const {
  std::vector<Point> out;
  for (std::size_t k = 0; k + 1 < best_vector.size(); k += 2) out.push_back(Point{best_vector[k], best_vector[k + 1]});
  return out;
}

PlacementResult optimize(const PlacementProblem& problem, const DEConfig& config) {
  const DEResult de = differential_evolution(
      [&problem](std::span<const double> v) { return problem.objective(v); }, problem.bounds(), config);
  PlacementResult out;
  out.best_vector = de.best;
  out.best_pd = 1.0 - problem.objective(de.best);
  out.history = de.history;
  out.evaluations = de.evaluations;
  out.generations = de.generations;
  return out;
}

}  // namespace sonarfield
