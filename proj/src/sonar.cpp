#include "sonarfield/sonar.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "sonarfield/errors.h"

namespace sonarfield {

namespace {

constexpr double kLog10e = std::numbers::log10e;

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field + ": " + what);
}

// 10*log10(e^x - e^-x) for x > 0 without forming e^x.
double db_of_two_sinh(double x) { return 10.0 * kLog10e * x + 10.0 * std::log10(-std::expm1(-2.0 * x)); }

// Spreading plus band-averaged absorption where the absorption exponent
// argument is scale*r. Shared by both range-unit forms.
double broadband_tl(double r, double absorption_scale, const SonarEnvironment& env) {
  const double x = absorption_scale * env.alpha_f * env.bandwidth_hz * r;
  const double absorption = 20.0 * absorption_scale * env.alpha_m * kLog10e * r;
  if (x == 0.0) {
    // Narrowband limit: (e^x - e^-x) / x -> 2.
    return absorption + 20.0 * std::log10(r) - 10.0 * std::log10(2.0);
  }
  const double ax = std::abs(x);
  return absorption + 30.0 * std::log10(r) +
         10.0 * std::log10(absorption_scale * std::abs(env.alpha_f) * env.bandwidth_hz) - db_of_two_sinh(ax);
}

// Smallest/largest r in [lo, hi] bracketing tl(r) == target, assuming tl increasing.
template <class Tl>
std::pair<double, double> bracket_range(Tl tl, double target, double lo, double hi) {
  double llo = std::log(lo);
  double lhi = std::log(hi);
  for (int i = 0; i < 200 && lhi - llo > 1e-15; ++i) {
    const double mid = 0.5 * (llo + lhi);
    if (tl(std::exp(mid)) < target) {
      llo = mid;
    } else {
      lhi = mid;
    }
  }
  return {std::exp(llo), std::exp(lhi)};
}

}  // namespace

void SonarEnvironment::validate() const {
  require(std::isfinite(bandwidth_hz) && bandwidth_hz > 0.0, "bandwidth_hz", "must be positive");
  require(std::isfinite(f_m_hz) && f_m_hz > 0.5 * bandwidth_hz, "f_m_hz", "must exceed half the bandwidth");
  require(std::isfinite(ssl_db) && ssl_db >= 0.0, "ssl_db", "must be a finite non-negative level");
  require(std::isfinite(nsl_db) && nsl_db >= 0.0, "nsl_db", "must be a finite non-negative level");
  require(std::isfinite(alpha_m) && alpha_m >= 0.0, "alpha_m_db_per_nmi", "must be non-negative");
  require(std::isfinite(alpha_f), "alpha_f_db_per_nmi_hz", "must be finite");
  require(std::abs(alpha_f) * 0.5 * bandwidth_hz <= alpha_m, "alpha_f_db_per_nmi_hz",
          "absorption must stay non-negative across the band (|alpha_f| * B/2 <= alpha_m)");
  require(std::isfinite(sound_speed_mps) && sound_speed_mps > 0.0, "sound_speed_mps", "must be positive");
}

RayleighNoiseModel::RayleighNoiseModel() : sigma_(std::sqrt(0.5)) {}

RayleighNoiseModel::RayleighNoiseModel(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma_f: must be positive");
}

double RayleighNoiseModel::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  return -std::expm1(-t * t / (2.0 * sigma_ * sigma_));
}

double RayleighNoiseModel::sample(std::mt19937_64& rng) const {
  return std::sqrt(2.0) * sigma_ * sample_reduced(rng);
}

double RayleighNoiseModel::sample_reduced(std::mt19937_64& rng) {
  // Inverse CDF of Ray(1/sqrt(2)): P(Y <= y) = 1 - exp(-y^2).
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  return std::sqrt(-std::log1p(-u));
}

double detection_index(double pd_req, double pfa_req) {
  if (!(pfa_req > 0.0 && pfa_req < 1.0) || !(pd_req > 0.0 && pd_req < 1.0)) {
    throw std::domain_error("detection_index: probabilities must lie in (0, 1)");
  }
  if (!(pfa_req < pd_req)) throw std::domain_error("detection_index: require pfa < pd");
  const double root = std::sqrt(std::log(pfa_req) / std::log(pd_req)) - 1.0;
  return (std::numbers::pi / (4.0 - std::numbers::pi)) * root * root;
}

Decibel detection_threshold(double d, double t_seconds) {
  if (!(d > 0.0) || !(t_seconds > 0.0)) {
    throw std::domain_error("detection_threshold: d and t must be positive");
  }
  const double ratio = d / t_seconds;
  return Decibel{10.0 * std::log10(0.273 * ratio + 1.045 * std::sqrt(ratio))};
}

DetectionDesign::DetectionDesign(double pd_req, double pfa_req, double t_seconds)
    : pd_req_(pd_req), pfa_req_(pfa_req), t_(t_seconds) {
  if (!(t_seconds > 0.0) || !std::isfinite(t_seconds)) throw ValidationError("t_seconds: must be positive");
  try {
    d_ = detection_index(pd_req, pfa_req);
  } catch (const std::domain_error&) {
    throw ValidationError("pfa: require 0 < pfa < pd < 1");
  }
  if (!(d_ > 0.0)) throw ValidationError("pfa: too close to pd, detection index is zero");
  dt_ = detection_threshold(d_, t_);
}

Decibel gamma_constant(const SonarEnvironment& env) {
  if (env.gamma_mode == GammaMode::Raw) return Decibel{env.nsl_db};
  return Decibel{env.nsl_db + 10.0 * std::log10(2.0 / std::sqrt(std::numbers::pi))};
}

Decibel transmission_loss_nmi(double r_nmi, const SonarEnvironment& env) {
  if (!(r_nmi > 0.0)) throw std::domain_error("transmission_loss_nmi: range must be positive");
  // Spreading in nmi, absorption exponent in kiloyards (1 nmi = 2 kyd).
  return Decibel{broadband_tl(r_nmi, 2.0, env)};
}

Decibel transmission_loss_kyd(double r_kyd, const SonarEnvironment& env) {
  if (!(r_kyd > 0.0)) throw std::domain_error("transmission_loss_kyd: range must be positive");
  return Decibel{broadband_tl(r_kyd, 1.0, env)};
}

namespace {

std::string aperture_message(double length_metres, double threshold_metres) {
  std::ostringstream os;
  os << "line array of " << length_metres << " m provides no gain; length must exceed " << threshold_metres << " m";
  return os.str();
}

}  // namespace

InsufficientApertureError::InsufficientApertureError(double length_metres, double threshold_metres)
    : std::domain_error(aperture_message(length_metres, threshold_metres)), threshold_(threshold_metres) {}

double array_gain_threshold_metres(const SonarEnvironment& env) {
  const double lambda1 = env.sound_speed_mps / env.f_high_hz();
  const double lambda2 = env.sound_speed_mps / env.f_low_hz();
  return 0.5 * lambda1 * lambda2;
}

ArrayGain array_gain(double length_nmi, const SonarEnvironment& env) {
  ArrayGain g{};
  g.length_metres = units::nmi_to_metres(length_nmi);
  g.lambda1_metres = env.sound_speed_mps / env.f_high_hz();
  g.lambda2_metres = env.sound_speed_mps / env.f_low_hz();
  const double threshold = 0.5 * g.lambda1_metres * g.lambda2_metres;
  if (!(g.length_metres > threshold)) throw InsufficientApertureError(g.length_metres, threshold);
  g.di = Decibel{10.0 * std::log10(2.0 * g.length_metres / (g.lambda1_metres * g.lambda2_metres))};
  return g;
}

Decibel directivity_index(double length_nmi, const SonarEnvironment& env) { return array_gain(length_nmi, env).di; }

namespace {

Decibel base_margin(const SonarEnvironment& env, const DetectionDesign& design, Decibel di) {
  return Decibel{env.ssl_db - design.threshold().value + di.value - gamma_constant(env).value};
}

}  // namespace

Decibel signal_margin(double r_nmi, const SonarEnvironment& env, const DetectionDesign& design, Decibel di) {
  return base_margin(env, design, di) - transmission_loss_nmi(r_nmi, env);
}

double pd_from_margin(Decibel margin) {
  const double z = std::pow(10.0, 0.2 * margin.value);
  const double p = -std::expm1(-z);
  if (std::isnan(p)) return margin.value > 0.0 ? 1.0 : 0.0;
  return std::clamp(p, 0.0, 1.0);
}

double single_sensor_pd(double r_nmi, const SonarEnvironment& env, const DetectionDesign& design, Decibel di) {
  if (r_nmi < 0.0 || std::isnan(r_nmi)) throw std::domain_error("single_sensor_pd: range must be non-negative");
  if (r_nmi == 0.0) return 1.0;
  return pd_from_margin(signal_margin(r_nmi, env, design, di));
}

DetectionCurve::DetectionCurve(const SonarEnvironment& env, const DetectionDesign& design, Decibel di)
    : base_(sonarfield::base_margin(env, design, di)),
      scale_(4.0 * std::pow(10.0, 0.2 * base_.value)),
      decay_(4.0 * env.alpha_m),
      spread_(2.0 * std::abs(env.alpha_f) * env.bandwidth_hz) {
  constexpr double kLo = 1e-12;
  constexpr double kHi = 1e4;
  auto tl = [&env](double r) { return transmission_loss_nmi(r, env).value; };

  // margin >= 5*log10(50): z >= 50, miss = exp(-z) < 2e-22.
  const double certain_tl = base_.value - 5.0 * std::log10(50.0);
  if (tl(kLo) >= certain_tl) {
    certain_ = 0.0;
  } else if (tl(kHi) < certain_tl) {
    certain_ = kHi;
  } else {
    certain_ = bracket_range(tl, certain_tl, kLo, kHi).first;
  }

  // margin <= -90: z <= 1e-18, exp(-z) rounds to 1.
  const double blind_tl = base_.value + 90.0;
  if (tl(kHi) < blind_tl) {
    blind_ = std::numeric_limits<double>::infinity();
  } else if (tl(kLo) >= blind_tl) {
    blind_ = kLo;
  } else {
    blind_ = bracket_range(tl, blind_tl, kLo, kHi).second;
  }
  certain_sq_ = certain_ * certain_;
  blind_sq_ = blind_ * blind_;
}

double DetectionCurve::exponent(double r) const {
  // F = (2 / r^2) * g with g = exp(-4 alpha_m r) * sinh(x) / x.
  const double x = spread_ * r;
  double g;
  if (x == 0.0) {
    g = std::exp(-decay_ * r);
  } else if (x < 20.0) {
    g = std::exp(-decay_ * r) * std::sinh(x) / x;
  } else {
    // decay_ >= spread_ by validation, so both exponents are <= 0.
    g = (std::exp(x - decay_ * r) - std::exp(-x - decay_ * r)) / (2.0 * x);
  }
  const double r2 = r * r;
  return scale_ * (g * g) / (r2 * r2);
}

double DetectionCurve::pd(double r_nmi) const {
  if (r_nmi < 0.0 || std::isnan(r_nmi)) throw std::domain_error("DetectionCurve::pd: range must be non-negative");
  if (r_nmi == 0.0) return 1.0;
  const double p = -std::expm1(-exponent(r_nmi));
  if (std::isnan(p)) return 1.0;  // inf/inf at vanishing range
  return std::clamp(p, 0.0, 1.0);
}

double DetectionCurve::miss_at_sq(double r2) const {
  if (r2 <= certain_sq_) return 0.0;
  if (r2 >= blind_sq_) return 1.0;
  return std::exp(-exponent(std::sqrt(r2)));
}

}  // namespace sonarfield
