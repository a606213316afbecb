#include "sonarfield/units.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sonarfield {

Decibel to_db(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("to_db: argument must be finite and positive, got " + std::to_string(x));
  }
  return Decibel{10.0 * std::log10(x)};
}

double from_db(Decibel d) { return std::pow(10.0, d.value / 10.0); }

}  // namespace sonarfield
