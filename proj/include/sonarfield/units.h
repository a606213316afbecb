#pragma once

#include <compare>

namespace sonarfield {

/// A level in decibels, 10*log10 of a linear power ratio.
struct Decibel {
  double value = 0.0;

  constexpr Decibel() = default;
  constexpr explicit Decibel(double v) : value(v) {}

  friend constexpr Decibel operator+(Decibel a, Decibel b) { return Decibel{a.value + b.value}; }
  friend constexpr Decibel operator-(Decibel a, Decibel b) { return Decibel{a.value - b.value}; }
  friend constexpr Decibel operator-(Decibel a) { return Decibel{-a.value}; }
  friend constexpr auto operator<=>(Decibel, Decibel) = default;
};

namespace units {

// One nautical mile is taken as two kiloyards throughout.
inline constexpr double kNmiPerKiloyard = 0.5;
inline constexpr double kMetresPerNmi = 1852.0;
inline constexpr double kDefaultSoundSpeed = 1500.0;  // m/s

constexpr double kiloyards_to_nmi(double kyd) { return kyd * kNmiPerKiloyard; }
constexpr double nmi_to_kiloyards(double nmi) { return nmi / kNmiPerKiloyard; }
constexpr double nmi_to_metres(double nmi) { return nmi * kMetresPerNmi; }
constexpr double metres_to_nmi(double m) { return m / kMetresPerNmi; }

}  // namespace units

/// 10*log10(x). Throws std::domain_error for x <= 0 or non-finite x.
Decibel to_db(double x);

/// 10^(d/10).
double from_db(Decibel d);

}  // namespace sonarfield
