#pragma once

#include <functional>

#include <Eigen/Dense>

#include "nhad/biortho.hpp"
#include "nhad/schedules.hpp"

namespace nhad {

using Matrix2 = Eigen::Matrix2cd;

/// Thresholds below which a design point is reported as singular instead of
/// producing spiked fields.
struct SingularityGuards {
  double omega1_floor = 1e-6;
  double cos_alpha_floor = 1e-6;
  double det_floor = kDefaultDetFloor;

  void validate() const;
};

struct OmegaFactors {
  double omega1;
  double omega2;
  double omega3;
};

/// One synthesized time point of the two-level design.
struct TwoLevelDesign {
  double t;
  AlphaValue alpha;
  Complex lambda;    // tan(alpha)
  Complex delta_e;   // E2 - E1
  Complex delta;     // delta_e * cos(2 alpha)
  double gamma;      // dissipation rate on |2>, zero in the simple case
  OmegaFactors omega;
  Complex e1;        // -Re[delta_e]/2 + i*omega3/2
  Matrix2 hamiltonian;
  BiorthogonalFrame frame;
};

/// Complex field amplitudes driving the qubit (Bohr-magneton scale absorbed).
struct FieldSample {
  double t;
  Complex b_x;
  Complex b_y;
  Complex b_z;
};

struct RelativePopulations {
  double p1r;
  double p2r;
};

/// tan(alpha). Throws ConsistencyViolation when alpha is within the guard of
/// an integer multiple of pi/2 (|cos alpha| or |sin alpha| below the floor).
Complex lambda_of_alpha(Complex alpha, double cos_alpha_floor = SingularityGuards{}.cos_alpha_floor);

/// Eigenframe with lambda = tan(alpha):
///   |phi_1> = (-sin^2 a / cos a, cos a),  |phi_2> = (sin a, sin a),
/// and the left partners written out analytically (no numeric inversion).
BiorthogonalFrame eigenframe_two_level(const AlphaValue& alpha, const SingularityGuards& guards = {});

/// d/dt of the tan(alpha) eigenframe's right matrix.
Matrix2 eigenframe_two_level_derivative(const AlphaValue& alpha, const SingularityGuards& guards = {});

/// Eigenframe with a constant lambda; couples both ways when alpha moves.
BiorthogonalFrame eigenframe_constant_lambda(const AlphaValue& alpha, Complex lambda);
Matrix2 eigenframe_constant_lambda_derivative(const AlphaValue& alpha, Complex lambda);

OmegaFactors omega_factors(double rho, double theta);

/// Dissipative synthesis: picks Delta_E so that Im[E0'] + Gamma/2 = 0.
/// Throws SynthesisSingularity when |Omega1| <= guards.omega1_floor.
TwoLevelDesign synthesize_dissipative(const RhoThetaParams& params, const GammaSpec& gamma, double t,
                                      const SingularityGuards& guards = {});

using RateSchedule = std::function<double(double)>;

/// Simple (Im[E0'] = 0) synthesis with a user-chosen Re[Delta_E](t).
TwoLevelDesign synthesize_simple(const RhoThetaParams& params, const RateSchedule& re_delta_e, double t,
                                 const SingularityGuards& guards = {});

FieldSample field_components(const TwoLevelDesign& design);

/// Bare-state relative populations of the unnormalized target eigenvector |phi_1>.
RelativePopulations ideal_relative_populations(Complex alpha,
                                               double cos_alpha_floor = SingularityGuards{}.cos_alpha_floor);

/// [[E1 + D cos^2 a, D sin^2 a], [D cos^2 a, E1 + D sin^2 a]] with D = delta_e.
Matrix2 hamiltonian_full_form(const TwoLevelDesign& design, Complex e1);

enum class SynthesisMode { Dissipative, Simple };
enum class LambdaMode { TanAlpha, Constant };

/// A complete time-dependent design: schedules, dissipation and synthesis
/// choices. Everything is evaluated analytically at any t.
struct DesignModel {
  RhoThetaParams schedule;
  GammaSpec gamma;
  SynthesisMode mode = SynthesisMode::Dissipative;
  double re_delta_e = 100.0;  // simple mode only
  LambdaMode lambda_mode = LambdaMode::TanAlpha;
  Complex lambda_constant{1.0, 0.0};
  SingularityGuards guards;

  TwoLevelDesign design_at(double t) const;
  BiorthogonalFrame frame_at(double t) const;
  Matrix frame_dot_at(double t) const;
  Spectrum spectrum_at(double t) const;
  Matrix2 hamiltonian_at(double t) const;
};

}  // namespace nhad
