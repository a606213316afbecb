#pragma once

#include <cstdint>
#include <vector>

#include "sonarfield/regions.h"
#include "sonarfield/sonar.h"

namespace sonarfield {

/// Environment, requirement, surveillance region and sensors: the unit of
/// evaluation. For hybrid regions `sensors` serve region A and `sensors_b`
/// serve region B; otherwise `sensors_b` must be empty.
struct Scenario {
  SonarEnvironment env;
  DetectionDesign design;
  Region region = SquareRegion{0.4};
  std::vector<Sensor> sensors;
  std::vector<Sensor> sensors_b;

  /// Checks the environment, the geometry, sensor containment and line-array
  /// aperture. Empty sensor lists are allowed here (placement templates) and
  /// rejected at evaluation time instead.
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct QuadratureSpec {
  enum class Scheme { GaussLegendre, Midpoint };
  Scheme scheme = Scheme::GaussLegendre;
  int nodes_per_axis = 128;

  void validate() const;
  friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

struct MonteCarloSpec {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  friend bool operator==(const MonteCarloSpec&, const MonteCarloSpec&) = default;
};

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

Decibel sensor_di(const Sensor& sensor, const SonarEnvironment& env);

/// Environment seen by region-B sensors: the scenario environment with the
/// region-B noise override applied when present.
SonarEnvironment region_b_environment(const Scenario& scenario);

/// Product over sensors of (1 - P_j) at (x, y). For hybrid scenarios the
/// subregion containing the point selects the sensor set (A on the shared edge).
double miss_product(const Scenario& scenario, Point target);

/// 1 - mean(miss_product) over a square or rectangular region.
double system_pd_rect(const Scenario& scenario, const QuadratureSpec& quad = {});

struct HybridTerms {
  double pd_a;
  double pd_b;
  RegionPrior prior;
  double total() const { return pd_a * prior.a + pd_b * prior.b; }
};

HybridTerms hybrid_terms(const Scenario& scenario, const QuadratureSpec& quad = {});
double system_pd_hybrid(const Scenario& scenario, const QuadratureSpec& quad = {});

/// Dispatches on the region kind.
double system_pd(const Scenario& scenario, const QuadratureSpec& quad = {});

/// Plain uniform sampling of threat locations; deterministic in the seed and
/// independent of the worker count.
MonteCarloEstimate system_pd_monte_carlo(const Scenario& scenario, const MonteCarloSpec& mc);

}  // namespace sonarfield
