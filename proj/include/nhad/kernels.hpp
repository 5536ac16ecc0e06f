#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nhad/adiabaticity.hpp"
#include "nhad/design.hpp"
#include "nhad/dynamics.hpp"

// Data-parallel loops over time grids. The functions in `kernels` use OpenMP;
// `kernels::serial` holds plain-loop reference versions with identical
// results, used by the tests and the benchmark.

namespace nhad::kernels {

/// One grid point of a synthesis sweep. A singular point keeps the failure
/// instead of a design.
struct SynthesisSample {
  double t = 0.0;
  std::optional<TwoLevelDesign> design;
  std::optional<ErrorKind> failure;
  std::string message;

  bool singular() const { return !design.has_value(); }
};

std::vector<double> uniform_grid(double t_end, std::size_t samples);

std::vector<SynthesisSample> synthesize_trace(const DesignModel& model, std::span<const double> grid);

/// Frames and analytic derivatives per sample; throws on the first singular point.
FrameTrace build_frame_trace(const DesignModel& model, std::span<const double> grid);

std::vector<Spectrum> spectrum_trace(const DesignModel& model, std::span<const double> grid);

PopulationTrace ideal_population_trace(const RhoThetaParams& schedule, std::span<const double> grid,
                                       const SingularityGuards& guards = {});

/// Adiabatic phases sampled on `grid`, integrated on a grid refined by a
/// power-of-two factor inside every interval. The factor doubles until the
/// refinement check of `adiabatic_phases` passes; GridTooCoarse past
/// `max_refinement`.
struct RefinedPhases {
  PhaseTrace phases;
  std::size_t refinement = 1;
};

RefinedPhases converged_phases(const DesignModel& model, std::span<const double> grid,
                               const PhaseOptions& options = {}, std::size_t max_refinement = 64);

/// g(t_a, t_b) for every pair of subgrid indices with b <= a (lower triangle);
/// entries above the diagonal are zero.
Matrix propagator_grid(const FrameTrace& trace, const PhaseTrace& phases, std::size_t target,
                       std::span<const std::size_t> indices);

namespace serial {

std::vector<SynthesisSample> synthesize_trace(const DesignModel& model, std::span<const double> grid);
FrameTrace build_frame_trace(const DesignModel& model, std::span<const double> grid);
std::vector<Spectrum> spectrum_trace(const DesignModel& model, std::span<const double> grid);
PopulationTrace ideal_population_trace(const RhoThetaParams& schedule, std::span<const double> grid,
                                       const SingularityGuards& guards = {});
Matrix propagator_grid(const FrameTrace& trace, const PhaseTrace& phases, std::size_t target,
                       std::span<const std::size_t> indices);

}  // namespace serial

namespace detail {

SynthesisSample synthesize_point(const DesignModel& model, double t);

}  // namespace detail

}  // namespace nhad::kernels
