#include "sonarfield/regions.h"

#include <algorithm>
#include <cmath>

#include "sonarfield/errors.h"

namespace sonarfield {

bool Rect::contains(Point p, double tol) const {
  return p.x >= x_lo - tol && p.x <= x_hi + tol && p.y >= y_lo - tol && p.y <= y_hi + tol;
}

double LineArraySensor::length() const { return std::hypot(b.x - a.x, b.y - a.y); }

Sensor Sensor::omni(Point position) {
  if (!std::isfinite(position.x) || !std::isfinite(position.y)) {
    throw ValidationError("position: must be finite");
  }
  return Sensor(OmniSensor{position});
}

Sensor Sensor::line_array(Point a, Point b) {
  if (!std::isfinite(a.x) || !std::isfinite(a.y) || !std::isfinite(b.x) || !std::isfinite(b.y)) {
    throw ValidationError("endpoints: must be finite");
  }
  if (a == b) throw ValidationError("endpoints: must be distinct");
  return Sensor(LineArraySensor{a, b});
}

double segment_distance_sq(Point a, Point b, Point p) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len_sq = dx * dx + dy * dy;
  double t = 0.0;
  if (len_sq > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len_sq, 0.0, 1.0);
  const double ex = p.x - (a.x + t * dx);
  const double ey = p.y - (a.y + t * dy);
  return ex * ex + ey * ey;
}

namespace {

struct RangeSq {
  Point target;
  double operator()(const OmniSensor& s) const {
    const double dx = target.x - s.position.x;
    const double dy = target.y - s.position.y;
    return dx * dx + dy * dy;
  }
  double operator()(const LineArraySensor& s) const { return segment_distance_sq(s.a, s.b, target); }
};

}  // namespace

double range_sq_to(const Sensor& sensor, Point target) { return std::visit(RangeSq{target}, sensor.geometry()); }

double range_to(const Sensor& sensor, Point target) { return std::sqrt(range_sq_to(sensor, target)); }

void validate_region(const Region& region) {
  auto finite = [](double v) { return std::isfinite(v); };
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, SquareRegion>) {
          if (!finite(r.side) || !(r.side > 0.0)) throw ValidationError("region.R: must be positive");
        } else if constexpr (std::is_same_v<T, RectRegion>) {
          const Rect& e = r.extent;
          if (!finite(e.x_lo) || !finite(e.x_hi) || !(e.x_lo < e.x_hi)) {
            throw ValidationError("region.x: require lo < hi");
          }
          if (!finite(e.y_lo) || !finite(e.y_hi) || !(e.y_lo < e.y_hi)) {
            throw ValidationError("region.y: require lo < hi");
          }
        } else {
          if (!finite(r.r1) || !(r.r1 > 0.0)) throw ValidationError("region.R1: must be positive");
          if (!finite(r.r2) || !(r.r2 > 0.0)) throw ValidationError("region.R2: must be positive");
          if (!finite(r.r3) || !(r.r3 > r.r1)) throw ValidationError("region.R3: must exceed R1");
          if (r.region_b_nsl_db && (!finite(*r.region_b_nsl_db) || *r.region_b_nsl_db < 0.0)) {
            throw ValidationError("region.region_b_nsl_db: must be a finite non-negative level");
          }
        }
      },
      region);
}

bool contains(const Region& region, Point p) {
  return std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, HybridRegion>) {
          return r.region_a().contains(p) || r.region_b().contains(p);
        } else {
          return r.bounds().contains(p);
        }
      },
      region);
}

RegionPrior region_prior_prob(const HybridRegion& h) {
  const double area_a = h.r1 * h.r2;
  const double area_b = 0.5 * h.r2 * (h.r3 - h.r1);
  const double total = area_a + area_b;
  // Derive the smaller term from the larger so that 1 - p is exact and a + b == 1.
  if (area_a >= area_b) {
    const double pa = area_a / total;
    return RegionPrior{pa, 1.0 - pa};
  }
  const double pb = area_b / total;
  return RegionPrior{1.0 - pb, pb};
}

}  // namespace sonarfield
