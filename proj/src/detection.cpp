#include "sonarfield/detection.h"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "sonarfield/errors.h"
#include "sonarfield/parallel.h"

namespace sonarfield {

namespace {

// Sensors inside the region to within this slack (nmi) to absorb rounding
// in rescaled geometries.
constexpr double kContainmentSlack = 1e-9;

void require_inside(const std::vector<Sensor>& sensors, const Rect& bounds, const std::string& label) {
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const std::string where = label + "[" + std::to_string(i) + "]";
    std::visit(
        [&](const auto& g) {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, OmniSensor>) {
            if (!bounds.contains(g.position, kContainmentSlack)) throw ValidationError(where + ": outside its region");
          } else {
            if (!bounds.contains(g.a, kContainmentSlack) || !bounds.contains(g.b, kContainmentSlack)) {
              throw ValidationError(where + ": array endpoints outside its region");
            }
          }
        },
        sensors[i].geometry());
  }
}

void require_aperture(const std::vector<Sensor>& sensors, const SonarEnvironment& env, const std::string& label) {
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    try {
      (void)sensor_di(sensors[i], env);
    } catch (const InsufficientApertureError& e) {
      throw ValidationError(label + "[" + std::to_string(i) + "]: " + e.what());
    }
  }
}

// Sensors paired with their precomputed range response.
class FusedField {
 public:
  FusedField(const SonarEnvironment& env, const DetectionDesign& design, const std::vector<Sensor>& sensors) {
    members_.reserve(sensors.size());
    for (const Sensor& s : sensors) {
      const Decibel di = sensor_di(s, env);
      std::size_t idx = curves_.size();
      for (std::size_t k = 0; k < curves_.size(); ++k) {
        if (curve_di_[k] == di.value) {
          idx = k;
          break;
        }
      }
      if (idx == curves_.size()) {
        curves_.emplace_back(env, design, di);
        curve_di_.push_back(di.value);
      }
      members_.push_back({s, idx});
    }
  }

  double miss(Point p) const {
    double product = 1.0;
    for (const Member& m : members_) {
      product *= curves_[m.curve].miss_at_sq(range_sq_to(m.sensor, p));
      if (product == 0.0) break;
    }
    return product;
  }

 private:
  struct Member {
    Sensor sensor;
    std::size_t curve;
  };
  std::vector<DetectionCurve> curves_;
  std::vector<double> curve_di_;
  std::vector<Member> members_;
};

struct AxisRule {
  std::vector<double> unit_nodes;  // in [0, 1]
  std::vector<double> weights;     // sum to 1
};

AxisRule axis_rule(const QuadratureSpec& quad) {
  quad.validate();
  const int n = quad.nodes_per_axis;
  AxisRule rule;
  if (quad.scheme == QuadratureSpec::Scheme::Midpoint) {
    rule.unit_nodes.resize(n);
    rule.weights.assign(n, 1.0 / n);
    for (int i = 0; i < n; ++i) rule.unit_nodes[i] = (i + 0.5) / n;
    return rule;
  }
  gauss_legendre(n, rule.unit_nodes, rule.weights);
  for (int i = 0; i < n; ++i) {
    rule.unit_nodes[i] = 0.5 * (rule.unit_nodes[i] + 1.0);
    rule.weights[i] *= 0.5;
  }
  return rule;
}

// Mean of the miss product over a rectangle. Rows are evaluated independently
// and reduced in row order, so the result does not depend on the worker count.
double mean_miss(const FusedField& field, const Rect& rect, const QuadratureSpec& quad) {
  const AxisRule rule = axis_rule(quad);
  const std::size_t n = rule.unit_nodes.size();
  std::vector<double> ys(n);
  for (std::size_t j = 0; j < n; ++j) ys[j] = rect.y_lo + rule.unit_nodes[j] * rect.height();

  std::vector<double> rows(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const double x = rect.x_lo + rule.unit_nodes[i] * rect.width();
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += rule.weights[j] * field.miss(Point{x, ys[j]});
    rows[i] = row;
  });
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += rule.weights[i] * rows[i];
  return total;
}

double pd_over(const SonarEnvironment& env, const DetectionDesign& design, const std::vector<Sensor>& sensors,
               const Rect& rect, const QuadratureSpec& quad, const char* label) {
  if (sensors.empty()) throw ValidationError(std::string(label) + ": at least one sensor is required");
  const FusedField field(env, design, sensors);
  const double pd = 1.0 - mean_miss(field, rect, quad);
  if (!std::isfinite(pd)) throw NumericalError("system detection probability is not finite");
  return std::clamp(pd, 0.0, 1.0);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

void Scenario::validate() const {
  env.validate();
  validate_region(region);
  if (const auto* h = std::get_if<HybridRegion>(&region)) {
    require_inside(sensors, h->region_a(), "sensors.region_a");
    require_inside(sensors_b, h->region_b(), "sensors.region_b");
    require_aperture(sensors, env, "sensors.region_a");
    require_aperture(sensors_b, region_b_environment(*this), "sensors.region_b");
  } else {
    if (!sensors_b.empty()) throw ValidationError("sensors: region B sensors given for a non-hybrid region");
    const Rect bounds = std::visit(
        [](const auto& r) -> Rect {
          if constexpr (std::is_same_v<std::decay_t<decltype(r)>, HybridRegion>) {
            return r.region_a();
          } else {
            return r.bounds();
          }
        },
        region);
    require_inside(sensors, bounds, "sensors");
    require_aperture(sensors, env, "sensors");
  }
}

void QuadratureSpec::validate() const {
  if (nodes_per_axis < 8) throw ValidationError("quadrature.nodes: must be at least 8");
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ValidationError("gauss_legendre: n must be positive");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

Decibel sensor_di(const Sensor& sensor, const SonarEnvironment& env) {
  if (const auto* arr = std::get_if<LineArraySensor>(&sensor.geometry())) return directivity_index(arr->length(), env);
  return Decibel{0.0};
}

SonarEnvironment region_b_environment(const Scenario& scenario) {
  SonarEnvironment env = scenario.env;
  if (const auto* h = std::get_if<HybridRegion>(&scenario.region); h && h->region_b_nsl_db) {
    env.nsl_db = *h->region_b_nsl_db;
  }
  return env;
}

double miss_product(const Scenario& scenario, Point target) {
  if (const auto* h = std::get_if<HybridRegion>(&scenario.region)) {
    if (h->region_a().contains(target)) return FusedField(scenario.env, scenario.design, scenario.sensors).miss(target);
    return FusedField(region_b_environment(scenario), scenario.design, scenario.sensors_b).miss(target);
  }
  return FusedField(scenario.env, scenario.design, scenario.sensors).miss(target);
}

double system_pd_rect(const Scenario& scenario, const QuadratureSpec& quad) {
  if (std::holds_alternative<HybridRegion>(scenario.region)) {
    throw ValidationError("system_pd_rect: region must be a square or rectangle");
  }
  const Rect bounds = std::holds_alternative<SquareRegion>(scenario.region)
                          ? std::get<SquareRegion>(scenario.region).bounds()
                          : std::get<RectRegion>(scenario.region).bounds();
  return pd_over(scenario.env, scenario.design, scenario.sensors, bounds, quad, "sensors");
}

HybridTerms hybrid_terms(const Scenario& scenario, const QuadratureSpec& quad) {
  const auto* h = std::get_if<HybridRegion>(&scenario.region);
  if (!h) throw ValidationError("system_pd_hybrid: region must be hybrid");
  HybridTerms terms{};
  terms.prior = region_prior_prob(*h);
  terms.pd_a = pd_over(scenario.env, scenario.design, scenario.sensors, h->region_a(), quad, "sensors.region_a");
  terms.pd_b = pd_over(region_b_environment(scenario), scenario.design, scenario.sensors_b, h->region_b(), quad,
                       "sensors.region_b");
  return terms;
}

double system_pd_hybrid(const Scenario& scenario, const QuadratureSpec& quad) {
  return hybrid_terms(scenario, quad).total();
}

double system_pd(const Scenario& scenario, const QuadratureSpec& quad) {
  if (std::holds_alternative<HybridRegion>(scenario.region)) return system_pd_hybrid(scenario, quad);
  return system_pd_rect(scenario, quad);
}

MonteCarloEstimate system_pd_monte_carlo(const Scenario& scenario, const MonteCarloSpec& mc) {
  if (mc.samples < 1) throw ValidationError("monte_carlo.samples: must be at least 1");

  const auto* hybrid = std::get_if<HybridRegion>(&scenario.region);
  Rect rect_a;
  Rect rect_b;
  double prior_a = 1.0;
  if (hybrid) {
    rect_a = hybrid->region_a();
    rect_b = hybrid->region_b();
    prior_a = region_prior_prob(*hybrid).a;
  } else {
    rect_a = std::holds_alternative<SquareRegion>(scenario.region) ? std::get<SquareRegion>(scenario.region).bounds()
                                                                    : std::get<RectRegion>(scenario.region).bounds();
  }
  if (scenario.sensors.empty()) throw ValidationError("sensors: at least one sensor is required");
  if (hybrid && scenario.sensors_b.empty()) throw ValidationError("sensors.region_b: at least one sensor is required");

  const FusedField field_a(scenario.env, scenario.design, scenario.sensors);
  const FusedField field_b = hybrid ? FusedField(region_b_environment(scenario), scenario.design, scenario.sensors_b)
                                    : FusedField(scenario.env, scenario.design, {});

  constexpr std::uint64_t kBatch = 1u << 16;
  const std::uint64_t batches = (mc.samples + kBatch - 1) / kBatch;
  std::vector<double> sums(batches, 0.0);
  std::vector<double> sumsq(batches, 0.0);

  parallel_for(batches, [&](std::size_t k) {
    std::mt19937_64 rng(splitmix64(mc.seed ^ splitmix64(k)));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const std::uint64_t begin = k * kBatch;
    const std::uint64_t end = std::min<std::uint64_t>(mc.samples, begin + kBatch);
    double s = 0.0;
    double s2 = 0.0;
    for (std::uint64_t i = begin; i < end; ++i) {
      bool in_a = true;
      if (hybrid) in_a = uniform(rng) < prior_a;
      const Rect& r = in_a ? rect_a : rect_b;
      const double x = r.x_lo + uniform(rng) * r.width();
      const double y = r.y_lo + uniform(rng) * r.height();
      const double hit = 1.0 - (in_a ? field_a : field_b).miss(Point{x, y});
      s += hit;
      s2 += hit * hit;
    }
    sums[k] = s;
    sumsq[k] = s2;
  });

  double s = 0.0;
  double s2 = 0.0;
  for (std::uint64_t k = 0; k < batches; ++k) {
    s += sums[k];
    s2 += sumsq[k];
  }
  const double n = static_cast<double>(mc.samples);
  MonteCarloEstimate out;
  out.estimate = s / n;
  if (mc.samples > 1) {
    const double var = std::max(0.0, (s2 - n * out.estimate * out.estimate) / (n - 1.0));
    out.std_error = std::sqrt(var / n);
  }
  return out;
}

}  // namespace sonarfield
