#include "nhad/schedules.hpp"

#include <cmath>

namespace nhad {

void RhoThetaParams::validate() const {
  for (double v : {offset, rho_amplitude, rho_frequency, theta_offset, theta_frequency}) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "schedule parameters must be finite");
  }
  if (!(offset > 0.0)) throw Error(ErrorKind::InvalidArgument, "schedule offset must be > 0");
}

GammaSpec GammaSpec::constant(double value) {
  GammaSpec spec;
  spec.mode = GammaMode::Constant;
  spec.value = value;
  return spec;
}

GammaSpec GammaSpec::gaussian(double peak, double center, double width) {
  GammaSpec spec;
  spec.mode = GammaMode::Gaussian;
  spec.peak = peak;
  spec.center = center;
  spec.width = width;
  return spec;
}

void GammaSpec::validate() const {
  if (mode == GammaMode::Constant) {
    if (!std::isfinite(value) || value < 0.0)
      throw Error(ErrorKind::InvalidArgument, "constant dissipation rate must be finite and >= 0");
    return;
  }
  if (!std::isfinite(peak) || peak < 0.0 || !std::isfinite(center))
    throw Error(ErrorKind::InvalidArgument, "Gaussian peak must be >= 0 and center finite");
  if (!(width > 0.0)) throw Error(ErrorKind::NonPositiveWidth, "Gaussian width T must be > 0");
}

PolarSample eval_rho_theta(const RhoThetaParams& p, double t) {
  const double mt = p.rho_frequency * t;
  const double nt = p.theta_frequency * t;
  return PolarSample{
      .rho = kPi / 2.0 - p.offset - p.rho_amplitude * std::sin(mt),
      .theta = p.theta_offset + std::sin(nt),
      .rho_dot = -p.rho_amplitude * p.rho_frequency * std::cos(mt),
      .theta_dot = p.theta_frequency * std::cos(nt),
  };
}

AlphaValue eval_alpha(const RhoThetaParams& params, double t) {
  const PolarSample s = eval_rho_theta(params, t);
  const Complex phase = std::polar(1.0, s.theta);
  return AlphaValue{
      .alpha = s.rho * phase,
      .alpha_dot = Complex(s.rho_dot, s.rho * s.theta_dot) * phase,
      .rho = s.rho,
      .theta = s.theta,
      .rho_dot = s.rho_dot,
      .theta_dot = s.theta_dot,
  };
}

double eval_gamma(const GammaSpec& spec, double t) {
  if (spec.mode == GammaMode::Constant) return spec.value;
  if (!(spec.width > 0.0)) throw Error(ErrorKind::NonPositiveWidth, "Gaussian width T must be > 0");
  const double x = (t - spec.center) / spec.width;
  return spec.peak * std::exp(-x * x);
}

}  // namespace nhad
