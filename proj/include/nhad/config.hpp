#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nhad/design.hpp"
#include "nhad/schedules.hpp"

namespace nhad {

/// Bad command line or configuration; maps to exit code 64.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InitialState { Eigenvector, BareApprox };

struct CheckSettings {
  std::size_t subgrid = 50;
  double coupling_threshold = 1e-9;
  double propagator_threshold = 1e-9;
  double tracking_threshold = 1e-6;
};

struct SynthesisSettings {
  // |Delta_E| below this fraction of its trace maximum counts as a near-zero gap
  double near_zero_fraction = 0.01;
  // consistency warning when more than this fraction of samples is near-zero
  double near_zero_warn_fraction = 0.5;
  // exit 2 when more than this fraction of samples is singular
  double singular_abort_fraction = 0.5;
};

struct SweepSettings {
  std::vector<double> mu_nu;  // sets mu and nu together
  std::vector<double> mu;
  std::vector<double> nu;
  std::vector<double> xi;
  std::vector<double> zeta;
  std::vector<double> gamma;
  std::size_t max_runs = 64;
  std::size_t workers = 0;  // 0: OpenMP default
};

struct RunConfig {
  RhoThetaParams schedule;
  GammaSpec gamma;
  SynthesisMode mode = SynthesisMode::Dissipative;
  double re_delta_e = 100.0;
  LambdaMode lambda_mode = LambdaMode::TanAlpha;
  double lambda_constant = 1.0;
  InitialState initial_state = InitialState::Eigenvector;
  double t_end = 1.5 * kPi;
  std::size_t samples = 4001;
  double rtol = 1e-9;
  SingularityGuards guards;
  std::string output_dir = ".";
  CheckSettings check;
  SynthesisSettings synthesis;
  SweepSettings sweep;

  DesignModel model() const;
  /// Throws UsageError when an invariant is violated.
  void validate() const;
};

/// Parses "1.5", "0.4pi", "pi/2", "-0.25pi".
double parse_number(std::string_view text);

/// Parses INI-style text; `overrides` are "section.key=value" strings applied
/// on top. Unknown keys are rejected.
RunConfig parse_config(std::string_view ini_text, const std::vector<std::string>& overrides = {});

RunConfig load_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides = {});

}  // namespace nhad
