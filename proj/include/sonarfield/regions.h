#pragma once

#include <optional>
#include <variant>

namespace sonarfield {

// All coordinates and lengths in this header are nautical miles.

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Closed axis-aligned rectangle [x_lo, x_hi] x [y_lo, y_hi].
struct Rect {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;

  double width() const { return x_hi - x_lo; }
  double height() const { return y_hi - y_lo; }
  double area() const { return width() * height(); }
  bool contains(Point p) const { return p.x >= x_lo && p.x <= x_hi && p.y >= y_lo && p.y <= y_hi; }
  /// contains() widened by tol on every side.
  bool contains(Point p, double tol) const;
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct OmniSensor {
  Point position;
  friend bool operator==(const OmniSensor&, const OmniSensor&) = default;
};

/// Unsteered line array lying along the segment a-b.
struct LineArraySensor {
  Point a;
  Point b;
  double length() const;
  friend bool operator==(const LineArraySensor&, const LineArraySensor&) = default;
};

class Sensor {
 public:
  using Geometry = std::variant<OmniSensor, LineArraySensor>;

  static Sensor omni(Point position);
  /// Throws ValidationError when the endpoints coincide.
  static Sensor line_array(Point a, Point b);

  const Geometry& geometry() const { return geometry_; }
  bool is_omni() const { return std::holds_alternative<OmniSensor>(geometry_); }
  bool is_line_array() const { return std::holds_alternative<LineArraySensor>(geometry_); }

  friend bool operator==(const Sensor&, const Sensor&) = default;

 private:
  explicit Sensor(Geometry g) : geometry_(g) {}
  Geometry geometry_;
};

/// Squared distance from p to the segment a-b (projection clamped to the segment).
double segment_distance_sq(Point a, Point b, Point p);

double range_sq_to(const Sensor& sensor, Point target);
double range_to(const Sensor& sensor, Point target);

struct SquareRegion {
  double side = 0.0;
  Rect bounds() const { return Rect{0.0, side, 0.0, side}; }
  friend bool operator==(const SquareRegion&, const SquareRegion&) = default;
};

struct RectRegion {
  Rect extent;
  Rect bounds() const { return extent; }
  friend bool operator==(const RectRegion&, const RectRegion&) = default;
};

/// An open area A = [0,R1]x[0,R2] joined to a chokepoint strip
/// B = [R1,R3]x[0.25 R2, 0.75 R2]. Region B may carry its own mean noise level.
struct HybridRegion {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  std::optional<double> region_b_nsl_db;

  Rect region_a() const { return Rect{0.0, r1, 0.0, r2}; }
  Rect region_b() const { return Rect{r1, r3, 0.25 * r2, 0.75 * r2}; }
  friend bool operator==(const HybridRegion&, const HybridRegion&) = default;
};

using Region = std::variant<SquareRegion, RectRegion, HybridRegion>;

/// Throws ValidationError on degenerate geometry.
void validate_region(const Region& region);

bool contains(const Region& region, Point p);

struct RegionPrior {
  double a;
  double b;
};

/// Area-proportional prior over the two hybrid subregions.
RegionPrior region_prior_prob(const HybridRegion& h);

}  // namespace sonarfield
