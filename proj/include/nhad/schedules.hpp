#pragma once

#include <complex>
#include <numbers>

#include "nhad/error.hpp"

// Time-dependent control schedules. All times are in units of 1/Omega and all
// rates in units of Omega; Omega itself is never stored.

namespace nhad {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Parameters of the built-in schedule family
///   rho(t)   = pi/2 - offset - rho_amplitude * sin(rho_frequency * t)
///   theta(t) = theta_offset + sin(theta_frequency * t)
/// Defaults reproduce the reference inversion run.
struct RhoThetaParams {
  double offset = 0.01;               // o, keeps rho(0) just below pi/2
  double rho_amplitude = 0.4 * kPi;   // xi
  double rho_frequency = 0.5;         // mu
  double theta_offset = 0.08 * kPi;   // zeta
  double theta_frequency = 0.5;       // nu

  /// Throws InvalidArgument unless offset > 0 and every field is finite.
  void validate() const;
};

struct PolarSample {
  double rho;
  double theta;
  double rho_dot;
  double theta_dot;
};

/// Complex mixing angle alpha = rho * exp(i theta) with its analytic time derivative.
struct AlphaValue {
  Complex alpha;
  Complex alpha_dot;
  double rho;
  double theta;
  double rho_dot;
  double theta_dot;
};

enum class GammaMode { Constant, Gaussian };

/// Dissipation rate on level |2>. Constant: `value`. Gaussian:
/// peak * exp(-((t - center) / width)^2).
struct GammaSpec {
  GammaMode mode = GammaMode::Constant;
  double value = 100.0;
  double peak = 100.0;
  double center = kPi;
  double width = std::numbers::sqrt2;

  static GammaSpec constant(double value);
  static GammaSpec gaussian(double peak, double center, double width);

  void validate() const;
};

PolarSample eval_rho_theta(const RhoThetaParams& params, double t);

AlphaValue eval_alpha(const RhoThetaParams& params, double t);

/// Throws NonPositiveWidth for a Gaussian spec with width <= 0.
double eval_gamma(const GammaSpec& spec, double t);

/// Central difference (f(t+h) - f(t-h)) / 2h. Test oracle for the analytic
/// derivatives; nothing on the production path differentiates numerically.
template <class F>
Complex finite_diff_derivative(F&& f, double t, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "finite difference step must be positive");
  return (Complex(f(t + h)) - Complex(f(t - h))) / (2.0 * h);
}

}  // namespace nhad
