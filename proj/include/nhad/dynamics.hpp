#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nhad/adiabaticity.hpp"
#include "nhad/biortho.hpp"

namespace nhad {

/// Integrated state with its norm factored out: the raw solution at sample i
/// is exp(log_scale[i]) * states[i], and every states[i] has unit 2-norm.
struct ScaledStateTrace {
  std::vector<double> grid;
  std::vector<Vector> states;
  std::vector<double> log_scale;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  std::size_t size() const { return grid.size(); }
};

struct PopulationTrace {
  std::vector<double> grid;
  std::vector<double> p1r;
  std::vector<double> p2r;
};

struct IntegratorOptions {
  double rtol = 1e-9;
  // the working state is rescaled to unit norm whenever its norm leaves this band
  double renorm_low = 1e-6;
  double renorm_high = 1e6;
  std::size_t max_steps = 20'000'000;
  // per-step tolerance is rtol * local_factor, so the accumulated error stays near rtol
  double local_factor = 1e-3;
};

using HamiltonianFn = std::function<Matrix(double)>;

/// Solves i psi' = H(t) psi on `grid` with an adaptive embedded Runge-Kutta
/// 7(8) pair. Throws ZeroInitialState, StepSizeUnderflow (step collapsed or
/// step budget exhausted) and InvalidArgument for a bad grid or rtol.
ScaledStateTrace integrate_schrodinger(const HamiltonianFn& hamiltonian, const Vector& psi0,
                                       std::span<const double> grid, const IntegratorOptions& options = {});

/// p_i^r = |psi_i|^2 / (|psi_1|^2 + |psi_2|^2). Throws DimensionMismatch unless N = 2.
PopulationTrace relative_populations(const ScaledStateTrace& trace);

/// max_t |c(t)/c(0) - 1| with c(t) = <phi^_mode|psi_raw(t)> exp(-i beta_mode(t)),
/// evaluated in the log domain. Throws GridMismatch or ZeroInitialProjection.
double mode_tracking_error(const ScaledStateTrace& trace, const FrameTrace& frames, const PhaseTrace& phases,
                           std::size_t mode, double projection_floor = 1e-12);

struct ComparisonMetrics {
  double sup_norm = 0.0;
  double rms = 0.0;
  std::vector<double> crossings_real;
  std::vector<double> crossings_ideal;
};

/// Times where p1r crosses 0.5, linearly interpolated between samples.
std::vector<double> half_crossings(std::span<const double> grid, std::span<const double> p1r);

/// Throws GridMismatch unless both traces share the grid.
ComparisonMetrics compare_real_ideal(const PopulationTrace& real, const PopulationTrace& ideal);

/// Linear interpolation of a sampled trace; NaN outside the grid.
double sample_at(std::span<const double> grid, std::span<const double> values, double t);

}  // namespace nhad
