#include "nhad/kernels.hpp"

namespace nhad::kernels::serial {

std::vector<SynthesisSample> synthesize_trace(const DesignModel& model, std::span<const double> grid) {
  std::vector<SynthesisSample> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(detail::synthesize_point(model, t));
  return out;
}

FrameTrace build_frame_trace(const DesignModel& model, std::span<const double> grid) {
  FrameTrace trace;
  trace.grid.assign(grid.begin(), grid.end());
  for (double t : grid) {
    trace.frames.push_back(model.frame_at(t));
    trace.frame_dots.push_back(model.frame_dot_at(t));
  }
  return trace;
}

std::vector<Spectrum> spectrum_trace(const DesignModel& model, std::span<const double> grid) {
  std::vector<Spectrum> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(model.spectrum_at(t));
  return out;
}

PopulationTrace ideal_population_trace(const RhoThetaParams& schedule, std::span<const double> grid,
                                       const SingularityGuards& guards) {
  PopulationTrace out;
  out.grid.assign(grid.begin(), grid.end());
  for (double t : grid) {
    const RelativePopulations p = ideal_relative_populations(eval_alpha(schedule, t).alpha, guards.cos_alpha_floor);
    out.p1r.push_back(p.p1r);
    out.p2r.push_back(p.p2r);
  }
  return out;
}

Matrix propagator_grid(const FrameTrace& trace, const PhaseTrace& phases, std::size_t target,
                       std::span<const std::size_t> indices) {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b <= a; ++b)
      out(a, b) = propagator_g(trace, phases, target, indices[static_cast<std::size_t>(a)],
                               indices[static_cast<std::size_t>(b)]);
  return out;
}

}  // namespace nhad::kernels::serial
