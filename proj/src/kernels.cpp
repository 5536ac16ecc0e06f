#include "nhad/kernels.hpp"

#include <exception>
#include <limits>
#include <optional>
#include <utility>

namespace nhad::kernels {
namespace {

// Runs body(i) for i in [0, n) across OpenMP threads and rethrows the
// exception of the lowest failing index, if any.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr first_error;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(nhad_kernel_error)
      {
        if (static_cast<std::size_t>(i) < first_index) {
          first_index = static_cast<std::size_t>(i);
          first_error = std::current_exception();
        }
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::vector<double> uniform_grid(double t_end, std::size_t samples) {
  if (samples < 2 || !(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid needs samples >= 2 and t_end > 0");
  std::vector<double> g(samples);
  const double h = t_end / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) g[i] = static_cast<double>(i) * h;
  g.back() = t_end;
  return g;
}

namespace detail {

SynthesisSample synthesize_point(const DesignModel& model, double t) {
  SynthesisSample s;
  s.t = t;
  try {
    s.design = model.design_at(t);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SynthesisSingularity && e.kind() != ErrorKind::ConsistencyViolation) throw;
    s.failure = e.kind();
    s.message = e.what();
  }
  return s;
}

}  // namespace detail

std::vector<SynthesisSample> synthesize_trace(const DesignModel& model, std::span<const double> grid) {
  std::vector<SynthesisSample> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { out[i] = detail::synthesize_point(model, grid[i]); });
  return out;
}

FrameTrace build_frame_trace(const DesignModel& model, std::span<const double> grid) {
  std::vector<std::optional<BiorthogonalFrame>> frames(grid.size());
  FrameTrace trace;
  trace.grid.assign(grid.begin(), grid.end());
  trace.frame_dots.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    frames[i].emplace(model.frame_at(grid[i]));
    trace.frame_dots[i] = model.frame_dot_at(grid[i]);
  });
  trace.frames.reserve(grid.size());
  for (auto& f : frames) trace.frames.push_back(std::move(*f));
  return trace;
}

std::vector<Spectrum> spectrum_trace(const DesignModel& model, std::span<const double> grid) {
  std::vector<Spectrum> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { out[i] = model.spectrum_at(grid[i]); });
  return out;
}

PopulationTrace ideal_population_trace(const RhoThetaParams& schedule, std::span<const double> grid,
                                       const SingularityGuards& guards) {
  PopulationTrace out;
  out.grid.assign(grid.begin(), grid.end());
  out.p1r.resize(grid.size());
  out.p2r.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const RelativePopulations p = ideal_relative_populations(eval_alpha(schedule, grid[i]).alpha, guards.cos_alpha_floor);
    out.p1r[i] = p.p1r;
    out.p2r[i] = p.p2r;
  });
  return out;
}

Matrix propagator_grid(const FrameTrace& trace, const PhaseTrace& phases, std::size_t target,
                       std::span<const std::size_t> indices) {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Matrix out = Matrix::Zero(n, n);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b <= a; ++b) pairs.emplace_back(a, b);
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto [a, b] = pairs[k];
    out(a, b) = propagator_g(trace, phases, target, indices[static_cast<std::size_t>(a)],
                             indices[static_cast<std::size_t>(b)]);
  });
  return out;
}

}  // namespace nhad::kernels

namespace nhad::kernels {

RefinedPhases converged_phases(const DesignModel& model, std::span<const double> grid, const PhaseOptions& options,
                               std::size_t max_refinement) {
  if (grid.size() < 2) throw Error(ErrorKind::InvalidArgument, "phase grid needs at least two samples");
  for (std::size_t r = 1;; r *= 2) {
    std::vector<double> fine;
    fine.reserve((grid.size() - 1) * r + 1);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double h = (grid[i + 1] - grid[i]) / static_cast<double>(r);
      for (std::size_t k = 0; k < r; ++k) fine.push_back(grid[i] + static_cast<double>(k) * h);
    }
    fine.push_back(grid.back());
    try {
      const FrameTrace frames = build_frame_trace(model, fine);
      const PhaseTrace full = adiabatic_phases(frames, spectrum_trace(model, fine), options);
      RefinedPhases out;
      out.refinement = r;
      out.phases.grid.assign(grid.begin(), grid.end());
      out.phases.beta.resize(full.modes());
      for (std::size_t m = 0; m < full.modes(); ++m) {
        out.phases.beta[m].reserve(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) out.phases.beta[m].push_back(full.beta[m][i * r]);
      }
      return out;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::GridTooCoarse || 2 * r > max_refinement) throw;
    }
  }
}

}  // namespace nhad::kernels
