#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nhad/biortho.hpp"

namespace nhad {

struct ScaledStateTrace;

/// Eigenframes and their time derivatives sampled on a common grid.
struct FrameTrace {
  std::vector<double> grid;
  std::vector<BiorthogonalFrame> frames;
  std::vector<Matrix> frame_dots;  // dA/dt per sample

  std::size_t size() const { return grid.size(); }
  std::size_t dim() const { return frames.empty() ? 0 : frames.front().dim(); }

  /// Throws InvalidArgument / DimensionMismatch on a malformed trace.
  void validate() const;

  /// <phi^_row(t)|d/dt phi_col(t)> at a sample.
  Complex coupling(std::size_t sample, std::size_t row, std::size_t col) const;
};

/// Adiabatic phases beta_n(t), beta_n(0) = 0, indexed [mode][sample].
struct PhaseTrace {
  std::vector<double> grid;
  std::vector<std::vector<Complex>> beta;

  std::size_t modes() const { return beta.size(); }
};

struct PhaseOptions {
  double refinement_tol = 1e-8;
  bool check_refinement = true;
};

/// Cumulative composite Simpson integral of sampled values, exact for
/// quadratics on non-uniform grids.
std::vector<Complex> cumulative_simpson(std::span<const double> grid, std::span<const Complex> values);

/// beta_n(t) = int_0^t (-E_n + i <phi^_n|phi_n'>) dt'. Throws GridTooCoarse if
/// the result moves by more than refinement_tol*(1+|beta|) against the grid
/// coarsened by two.
std::vector<Complex> adiabatic_phase(const FrameTrace& trace, std::span<const Spectrum> spectra, std::size_t mode,
                                     const PhaseOptions& options = {});

PhaseTrace adiabatic_phases(const FrameTrace& trace, std::span<const Spectrum> spectra,
                            const PhaseOptions& options = {});

/// -Im[E_n] + Re[<phi^_n|phi_n'>]; zero means the mode's phase is non-lossy.
double auxiliary_residual(const FrameTrace& trace, Complex e_n, std::size_t mode, std::size_t sample);

/// H'[k][m] = -i <phi^_k|phi_m'> exp(i(beta_m - beta_k)) for k != m, zero diagonal.
Matrix rotating_hamiltonian(const FrameTrace& trace, const PhaseTrace& phases, std::size_t sample);

/// Target mode (P) against the remaining modes (Q), in ascending mode order.
struct PQPartition {
  std::size_t target;
  Vector r_vector;
  Vector w_vector;
  Matrix d_matrix;
};

PQPartition pq_partition(const FrameTrace& trace, const PhaseTrace& phases, std::size_t target, std::size_t sample);

/// Time-ordered G(t,s) = T exp(-i int_s^t D), as a product of per-interval
/// exponentials of the endpoint-averaged D. Throws OrderViolation if s > t.
Matrix ordered_evolution(const FrameTrace& trace, const PhaseTrace& phases, std::size_t target, std::size_t t_sample,
                         std::size_t s_sample);

/// g(t,s) = R(t) G(t,s) W(s). Phase factors are combined before
/// exponentiation so huge W against vanishing R cannot produce NaN.
Complex propagator_g(const FrameTrace& trace, const PhaseTrace& phases, std::size_t target, std::size_t t_sample,
                     std::size_t s_sample);

/// Two-level closed form:
/// g = -<phi^_T|phi_Q'>(t) <phi^_Q|phi_T'>(s) exp(i int_s^t (beta_Q' - beta_T')).
Complex propagator_g_two_level(const FrameTrace& trace, const PhaseTrace& phases, std::size_t target,
                               std::size_t t_sample, std::size_t s_sample);

/// `count` indices spread evenly over [0, n), always including both ends.
std::vector<std::size_t> subgrid_indices(std::size_t n, std::size_t count);

struct ReportOptions {
  std::size_t subgrid = 50;
  double propagator_threshold = 1e-9;
  double tracking_threshold = 1e-6;
};

struct AdiabaticityReport {
  std::size_t target = 0;
  double max_biorthogonality_residual = 0.0;
  double max_coupling = 0.0;          // max |<phi^_target|phi_m'>|, m != target
  double max_reverse_coupling = 0.0;  // max |<phi^_m|phi_target'>|, m != target
  double max_propagator = 0.0;        // max |g(t,s)| over the subgrid, s <= t
  std::vector<double> auxiliary_residuals;
  double residual_min = 0.0;
  double residual_max = 0.0;
  double residual_mean = 0.0;
  std::optional<double> tracking_error;
  bool non_adiabatic = false;
};

AdiabaticityReport adiabaticity_report(const FrameTrace& trace, std::span<const Spectrum> spectra,
                                       const PhaseTrace& phases, std::size_t target, const ReportOptions& options = {},
                                       const ScaledStateTrace* sim = nullptr);

}  // namespace nhad
