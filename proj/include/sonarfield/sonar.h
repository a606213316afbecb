#pragma once

#include <random>
#include <stdexcept>

#include "sonarfield/units.h"

namespace sonarfield {

/// How the deterministic noise term is formed from the mean noise spectrum level.
///  - Scaled: nsl_db + 10*log10(2/sqrt(pi)), the Rayleigh-mean correction.
///  - Raw:    nsl_db as given.
enum class GammaMode { Scaled, Raw };

/// Broadband acoustic environment. Absorption follows
/// alpha(f) = alpha_m + alpha_f * (f - f_m) across the band.
struct SonarEnvironment {
  double f_m_hz = 100.0;
  double bandwidth_hz = 30.0;
  double ssl_db = 133.0;
  double nsl_db = 68.5;
  double alpha_m = 31.2218;  // dB/nmi basis
  double alpha_f = 0.20347;  // dB/(nmi Hz) basis
  double sound_speed_mps = units::kDefaultSoundSpeed;
  GammaMode gamma_mode = GammaMode::Scaled;

  /// Throws ValidationError naming the offending field.
  void validate() const;

  friend bool operator==(const SonarEnvironment&, const SonarEnvironment&) = default;

  double f_low_hz() const { return f_m_hz - 0.5 * bandwidth_hz; }
  double f_high_hz() const { return f_m_hz + 0.5 * bandwidth_hz; }
};

/// Ray(sigma) noise at baseband. Only sigma^2 = 0.5 is admitted by the
/// closed-form detection probability; the reduced variable
/// Y = NSL(f) / (sqrt(2) sigma) is Ray(1/sqrt(2)) for any sigma.
class RayleighNoiseModel {
 public:
  RayleighNoiseModel();
  explicit RayleighNoiseModel(double sigma);

  double sigma() const { return sigma_; }
  double cdf(double t) const;
  double sample(std::mt19937_64& rng) const;

  /// Draws from the reduced variable Y ~ Ray(1/sqrt(2)).
  static double sample_reduced(std::mt19937_64& rng);
  static constexpr double kReducedScale = 0.70710678118654752440;

 private:
  double sigma_;
};

double detection_index(double pd_req, double pfa_req);
Decibel detection_threshold(double d, double t_seconds);

/// Operating requirement plus the detection index and threshold it implies.
class DetectionDesign {
 public:
  DetectionDesign() : DetectionDesign(0.5, 1e-4, 1.0) {}
  DetectionDesign(double pd_req, double pfa_req, double t_seconds);

  double pd_req() const { return pd_req_; }
  double pfa_req() const { return pfa_req_; }
  double t_seconds() const { return t_; }
  double index() const { return d_; }
  Decibel threshold() const { return dt_; }

  friend bool operator==(const DetectionDesign&, const DetectionDesign&) = default;

 private:
  double pd_req_;
  double pfa_req_;
  double t_;
  double d_;
  Decibel dt_;
};

Decibel gamma_constant(const SonarEnvironment& env);

Decibel transmission_loss_nmi(double r_nmi, const SonarEnvironment& env);

/// Kiloyard form. alpha_m and alpha_f are read from env unchanged and taken
/// per kiloyard. Equals transmission_loss_nmi(r/2) + 20*log10(2) for the same
/// coefficients, since the nautical-mile form keeps spreading referenced to
/// 1 nmi.
Decibel transmission_loss_kyd(double r_kyd, const SonarEnvironment& env);

/// Thrown when a line array is too short to provide gain.
class InsufficientApertureError : public std::domain_error {
 public:
  InsufficientApertureError(double length_metres, double threshold_metres);
  double threshold_metres() const { return threshold_; }

 private:
  double threshold_;
};

struct ArrayGain {
  double length_metres;
  double lambda1_metres;  // shortest wavelength in band
  double lambda2_metres;  // longest wavelength in band
  Decibel di;
};

/// Minimum array length, in metres, for broadband gain: 0.5 * lambda1 * lambda2.
double array_gain_threshold_metres(const SonarEnvironment& env);

ArrayGain array_gain(double length_nmi, const SonarEnvironment& env);
Decibel directivity_index(double length_nmi, const SonarEnvironment& env);

/// SSL - TL(r) - DT + DI - gamma.
Decibel signal_margin(double r_nmi, const SonarEnvironment& env, const DetectionDesign& design, Decibel di);

/// 1 - exp(-10^(0.2*margin)), clamped to [0, 1].
double pd_from_margin(Decibel margin);

/// Single-sensor detection probability at range r. r == 0 gives 1.
double single_sensor_pd(double r_nmi, const SonarEnvironment& env, const DetectionDesign& design, Decibel di);

/// Pd as a function of range for one (environment, design, DI) triple,
/// evaluated in the linear domain: 10^(0.2 * margin) = 10^(0.2 * base) * F^2
/// with F the broadband spreading/absorption factor, so no logarithms are
/// taken per point. Agrees with single_sensor_pd to rounding. Inside
/// certain_range() the miss probability is below 2e-22 and reported as 0;
/// beyond blind_range() it rounds to 1.
class DetectionCurve {
 public:
  DetectionCurve(const SonarEnvironment& env, const DetectionDesign& design, Decibel di);

  double pd(double r_nmi) const;
  /// 1 - Pd at squared range r2 (nmi^2).
  double miss_at_sq(double r2) const;

  double certain_range() const { return certain_; }
  double blind_range() const { return blind_; }
  Decibel base_margin() const { return base_; }

 private:
  double exponent(double r) const;  // 10^(0.2 * margin(r))

  Decibel base_;   // SSL - DT + DI - gamma
  double scale_;   // 4 * 10^(0.2 * base)
  double decay_;   // 4 * alpha_m, absorption exponent per nmi
  double spread_;  // 2 * |alpha_f| * B
  double certain_;
  double blind_;
  double certain_sq_;
  double blind_sq_;
};

}  // namespace sonarfield
