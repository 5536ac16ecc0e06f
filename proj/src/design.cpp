#include "nhad/design.hpp"

#include <cmath>
#include <string>

namespace nhad {
namespace {

constexpr Complex kI{0.0, 1.0};

struct DesignCore {
  AlphaValue alpha;
  OmegaFactors omega;
  double gamma;
  Complex delta_e;
  Complex delta;
  Complex e1;
};

void check_alpha(Complex alpha, double floor) {
  if (std::abs(std::cos(alpha)) < floor || std::abs(std::sin(alpha)) < floor)
    throw Error(ErrorKind::ConsistencyViolation, "alpha is too close to a multiple of pi/2");
}

// 1/2 (D sx - i d sy + z sz)
Matrix2 pauli_form(Complex delta_e, Complex delta, Complex z) {
  Matrix2 h;
  h << z, delta_e - delta, delta_e + delta, -z;
  return 0.5 * h;
}

DesignCore dissipative_core(const RhoThetaParams& params, const GammaSpec& spec, double t,
                            const SingularityGuards& guards) {
  DesignCore c{};
  c.alpha = eval_alpha(params, t);
  check_alpha(c.alpha.alpha, guards.cos_alpha_floor);
  c.omega = omega_factors(c.alpha.rho, c.alpha.theta);
  if (!(std::abs(c.omega.omega1) > guards.omega1_floor))
    throw Error(ErrorKind::SynthesisSingularity, "|Omega1| below floor at t=" + std::to_string(t));
  c.gamma = eval_gamma(spec, t);
  const double im = -c.gamma - c.omega.omega3;
  const double re = -(im * (1.0 + c.omega.omega2) + c.omega.omega3) / c.omega.omega1;
  c.delta_e = Complex(re, im);
  if (c.delta_e == Complex{}) throw Error(ErrorKind::ConsistencyViolation, "Delta_E vanishes");
  c.delta = c.delta_e * std::cos(2.0 * c.alpha.alpha);
  c.e1 = Complex(-re / 2.0, c.omega.omega3 / 2.0);
  return c;
}

DesignCore simple_core(const RhoThetaParams& params, double re_delta_e, double t, const SingularityGuards& guards) {
  DesignCore c{};
  c.alpha = eval_alpha(params, t);
  check_alpha(c.alpha.alpha, guards.cos_alpha_floor);
  if (re_delta_e == 0.0 || !std::isfinite(re_delta_e))
    throw Error(ErrorKind::ConsistencyViolation, "Re[Delta_E] must be finite and nonzero");
  c.omega = omega_factors(c.alpha.rho, c.alpha.theta);
  c.gamma = 0.0;
  c.delta_e = Complex(re_delta_e, -c.omega.omega3);
  c.delta = c.delta_e * std::cos(2.0 * c.alpha.alpha);
  c.e1 = Complex(-re_delta_e / 2.0, c.omega.omega3 / 2.0);
  return c;
}

Matrix2 dissipative_hamiltonian(const DesignCore& c) {
  Matrix2 h = pauli_form(c.delta_e, c.delta, c.delta.real());
  h(1, 1) += -kI * c.gamma;
  return h;
}

Matrix2 simple_hamiltonian(const DesignCore& c) { return pauli_form(c.delta_e, c.delta, c.delta); }

TwoLevelDesign assemble_design(double t, const DesignCore& c, const Matrix2& h, const SingularityGuards& guards) {
  return TwoLevelDesign{
      .t = t,
      .alpha = c.alpha,
      .lambda = lambda_of_alpha(c.alpha.alpha, guards.cos_alpha_floor),
      .delta_e = c.delta_e,
      .delta = c.delta,
      .gamma = c.gamma,
      .omega = c.omega,
      .e1 = c.e1,
      .hamiltonian = h,
      .frame = eigenframe_two_level(c.alpha, guards),
  };
}

DesignCore model_core(const DesignModel& m, double t) {
  return m.mode == SynthesisMode::Dissipative ? dissipative_core(m.schedule, m.gamma, t, m.guards)
                                              : simple_core(m.schedule, m.re_delta_e, t, m.guards);
}

}  // namespace

void SingularityGuards::validate() const {
  if (!(omega1_floor > 0.0) || !(cos_alpha_floor > 0.0) || !(det_floor > 0.0))
    throw Error(ErrorKind::InvalidArgument, "singularity guards must be strictly positive");
}

Complex lambda_of_alpha(Complex alpha, double cos_alpha_floor) {
  check_alpha(alpha, cos_alpha_floor);
  return std::tan(alpha);
}

BiorthogonalFrame eigenframe_two_level(const AlphaValue& a, const SingularityGuards& guards) {
  check_alpha(a.alpha, guards.cos_alpha_floor);
  const Complex s = std::sin(a.alpha);
  const Complex c = std::cos(a.alpha);
  Matrix right(2, 2);
  right << -s * s / c, s, c, s;
  Matrix left(2, 2);
  left << -c, c, c * c / s, s;
  return BiorthogonalFrame(std::move(right), std::move(left));
}

Matrix2 eigenframe_two_level_derivative(const AlphaValue& a, const SingularityGuards& guards) {
  check_alpha(a.alpha, guards.cos_alpha_floor);
  const Complex s = std::sin(a.alpha);
  const Complex c = std::cos(a.alpha);
  Matrix2 d;
  d << -s * (1.0 + c * c) / (c * c), c, -s, c;
  return a.alpha_dot * d;
}

BiorthogonalFrame eigenframe_constant_lambda(const AlphaValue& a, Complex lambda) {
  if (lambda == Complex{}) throw Error(ErrorKind::SingularFrame, "constant lambda must be nonzero");
  const Complex s = std::sin(a.alpha);
  const Complex c = std::cos(a.alpha);
  Matrix right(2, 2);
  right << -lambda * s, lambda * c, c, s;
  Matrix left(2, 2);
  left << -s / lambda, c, c / lambda, s;
  return BiorthogonalFrame(std::move(right), std::move(left));
}

Matrix2 eigenframe_constant_lambda_derivative(const AlphaValue& a, Complex lambda) {
  const Complex s = std::sin(a.alpha);
  const Complex c = std::cos(a.alpha);
  Matrix2 d;
  d << -lambda * c, -lambda * s, -s, c;
  return a.alpha_dot * d;
}

OmegaFactors omega_factors(double rho, double theta) {
  const double a = 2.0 * rho * std::cos(theta);
  const double b = 2.0 * rho * std::sin(theta);
  return OmegaFactors{
      .omega1 = std::sin(a) * std::sinh(-b),
      .omega2 = std::cos(a) * std::cosh(b),
      .omega3 = std::sin(a) * std::cosh(b),
  };
}

TwoLevelDesign synthesize_dissipative(const RhoThetaParams& params, const GammaSpec& gamma, double t,
                                      const SingularityGuards& guards) {
  const DesignCore c = dissipative_core(params, gamma, t, guards);
  return assemble_design(t, c, dissipative_hamiltonian(c), guards);
}

TwoLevelDesign synthesize_simple(const RhoThetaParams& params, const RateSchedule& re_delta_e, double t,
                                 const SingularityGuards& guards) {
  const DesignCore c = simple_core(params, re_delta_e(t), t, guards);
  return assemble_design(t, c, simple_hamiltonian(c), guards);
}

FieldSample field_components(const TwoLevelDesign& d) {
  return FieldSample{
      .t = d.t,
      .b_x = Complex(d.delta_e.real(), d.delta_e.imag()),
      .b_y = Complex(d.delta.imag(), -d.delta.real()),
      .b_z = Complex(d.delta.real(), d.delta.imag()),
  };
}

RelativePopulations ideal_relative_populations(Complex alpha, double cos_alpha_floor) {
  check_alpha(alpha, cos_alpha_floor);
  const Complex s = std::sin(alpha);
  const Complex c = std::cos(alpha);
  const double p1 = std::norm(s * s / c);
  const double p2 = std::norm(c);
  const double total = p1 + p2;
  return RelativePopulations{p1 / total, p2 / total};
}

Matrix2 hamiltonian_full_form(const TwoLevelDesign& d, Complex e1) {
  const Complex c2 = std::pow(std::cos(d.alpha.alpha), 2);
  const Complex s2 = std::pow(std::sin(d.alpha.alpha), 2);
  Matrix2 h;
  h << e1 + d.delta_e * c2, d.delta_e * s2, d.delta_e * c2, e1 + d.delta_e * s2;
  return h;
}

TwoLevelDesign DesignModel::design_at(double t) const {
  const DesignCore c = model_core(*this, t);
  return assemble_design(t, c, mode == SynthesisMode::Dissipative ? dissipative_hamiltonian(c) : simple_hamiltonian(c),
                         guards);
}

BiorthogonalFrame DesignModel::frame_at(double t) const {
  const AlphaValue a = eval_alpha(schedule, t);
  if (lambda_mode == LambdaMode::Constant) return eigenframe_constant_lambda(a, lambda_constant);
  return eigenframe_two_level(a, guards);
}

Matrix DesignModel::frame_dot_at(double t) const {
  const AlphaValue a = eval_alpha(schedule, t);
  if (lambda_mode == LambdaMode::Constant) return eigenframe_constant_lambda_derivative(a, lambda_constant);
  return eigenframe_two_level_derivative(a, guards);
}

Spectrum DesignModel::spectrum_at(double t) const {
  const DesignCore c = model_core(*this, t);
  return Spectrum{{c.e1, c.e1 + c.delta_e}};
}

Matrix2 DesignModel::hamiltonian_at(double t) const {
  const DesignCore c = model_core(*this, t);
  if (lambda_mode == LambdaMode::TanAlpha)
    return mode == SynthesisMode::Dissipative ? dissipative_hamiltonian(c) : simple_hamiltonian(c);
  const BiorthogonalFrame f = eigenframe_constant_lambda(c.alpha, lambda_constant);
  Matrix2 h = f.right() * Eigen::Vector2cd(c.e1, c.e1 + c.delta_e).asDiagonal() * f.left();
  return h;
}

}  // namespace nhad
