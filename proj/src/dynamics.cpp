#include "nhad/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

namespace nhad {
namespace {

constexpr Complex kI{0.0, 1.0};

using State = std::vector<Complex>;

double max_abs(const State& x) {
  double m = 0.0;
  for (const Complex& v : x) m = std::max(m, std::abs(v));
  return m;
}

double norm2(const State& x) {
  double s = 0.0;
  for (const Complex& v : x) s += std::norm(v);
  return std::sqrt(s);
}

Vector to_vector(const State& x, double scale) {
  Vector v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i)) = x[i] * scale;
  return v;
}

bool same_grid(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::abs(a[i]))) return false;
  }
  return true;
}

}  // namespace

ScaledStateTrace integrate_schrodinger(const HamiltonianFn& hamiltonian, const Vector& psi0,
                                       std::span<const double> grid, const IntegratorOptions& options) {
  if (!(options.rtol > 1e-13 && options.rtol < 1e-3))
    throw Error(ErrorKind::InvalidArgument, "rtol must lie in (1e-13, 1e-3)");
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty output grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::InvalidArgument, "grid must be strictly increasing");
  const double n0 = psi0.norm();
  if (!(n0 > 0.0) || !std::isfinite(n0)) throw Error(ErrorKind::ZeroInitialState, "initial state has zero norm");

  const std::size_t dim = static_cast<std::size_t>(psi0.size());
  State x(dim);
  for (std::size_t i = 0; i < dim; ++i) x[i] = psi0(static_cast<Eigen::Index>(i)) / n0;

  auto rhs = [&](const State& in, State& out, double t) {
    const Matrix h = hamiltonian(t);
    for (std::size_t r = 0; r < dim; ++r) {
      Complex acc{};
      for (std::size_t c = 0; c < dim; ++c) acc += h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
      out[r] = -kI * acc;
    }
  };

  ScaledStateTrace trace;
  trace.grid.assign(grid.begin(), grid.end());
  trace.states.reserve(grid.size());
  trace.log_scale.reserve(grid.size());
  trace.states.push_back(to_vector(x, 1.0));
  trace.log_scale.push_back(0.0);

  boost::numeric::odeint::runge_kutta_fehlberg78<State> stepper;
  State trial(dim), err(dim);
  double log_acc = 0.0;
  double t = grid.front();
  const double h_norm = std::max(hamiltonian(t).cwiseAbs().rowwise().sum().maxCoeff(), 1e-12);
  if (!(options.local_factor > 0.0 && options.local_factor <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "local_factor must lie in (0, 1]");
  const double tol = options.rtol * options.local_factor;
  // Components below this fraction of the largest one are controlled in
  // absolute terms; below it, roundoff in the error estimate would dominate.
  const double floor_frac = std::min(1.0, 64.0 * std::numeric_limits<double>::epsilon() / tol);
  double dt = 0.05 * std::pow(tol, 0.125) / h_norm;
  constexpr double kOrder = 8.0;

  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double target = grid[k];
    while (t < target) {
      const double remaining = target - t;
      const bool last = dt >= remaining;
      const double step = last ? remaining : dt;
      if (step < 1e-14 * std::max(1.0, std::abs(t)))
        throw Error(ErrorKind::StepSizeUnderflow, "step size collapsed at t=" + std::to_string(t));
      if (trace.accepted_steps + trace.rejected_steps >= options.max_steps)
        throw Error(ErrorKind::StepSizeUnderflow, "step budget exhausted at t=" + std::to_string(t));

      stepper.do_step(rhs, x, t, trial, step, err);
      const double floor = floor_frac * std::max(max_abs(x), max_abs(trial));
      double e = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double sc = std::max({std::abs(x[i]), std::abs(trial[i]), floor});
        e = std::max(e, std::abs(err[i]) / (tol * sc));
      }
      if (!std::isfinite(e)) e = 1e10;

      if (e <= 1.0) {
        ++trace.accepted_steps;
        t = last ? target : t + step;
        x.swap(trial);
        const double nrm = norm2(x);
        if (nrm < options.renorm_low || nrm > options.renorm_high) {
          for (Complex& v : x) v /= nrm;
          log_acc += std::log(nrm);
        }
        const double fac = e > 0.0 ? 0.9 * std::pow(e, -1.0 / kOrder) : 5.0;
        // a step shortened to land on the grid says nothing about the next one
        if (!last || step == dt) dt = step * std::clamp(fac, 0.2, 5.0);
      } else {
        ++trace.rejected_steps;
        dt = step * std::clamp(0.9 * std::pow(e, -1.0 / kOrder), 0.1, 0.9);
      }
    }
    const double nrm = norm2(x);
    trace.states.push_back(to_vector(x, 1.0 / nrm));
    trace.log_scale.push_back(log_acc + std::log(nrm));
  }
  return trace;
}

PopulationTrace relative_populations(const ScaledStateTrace& trace) {
  PopulationTrace out;
  out.grid = trace.grid;
  out.p1r.reserve(trace.size());
  out.p2r.reserve(trace.size());
  for (const Vector& s : trace.states) {
    if (s.size() != 2) throw Error(ErrorKind::DimensionMismatch, "relative populations need a two-level state");
    const double a = std::norm(s(0));
    const double b = std::norm(s(1));
    out.p1r.push_back(a / (a + b));
    out.p2r.push_back(b / (a + b));
  }
  return out;
}

double mode_tracking_error(const ScaledStateTrace& trace, const FrameTrace& frames, const PhaseTrace& phases,
                           std::size_t mode, double projection_floor) {
  if (!same_grid(trace.grid, frames.grid) || !same_grid(trace.grid, phases.grid))
    throw Error(ErrorKind::GridMismatch, "state, frame and phase traces must share a grid");
  if (mode >= frames.dim() || mode >= phases.modes())
    throw Error(ErrorKind::IndexOutOfRange, "mode " + std::to_string(mode));
  if (trace.size() == 0) return 0.0;

  const Complex p0 = project_mode(frames.frames[0], trace.states[0], mode);
  if (!(std::abs(p0) > projection_floor))
    throw Error(ErrorKind::ZeroInitialProjection, "initial state has no overlap with the tracked mode");
  const auto& beta = phases.beta[mode];
  // log c(t) = log <phi^|states> + log_scale - i beta
  const Complex log_c0 = Complex(trace.log_scale[0], 0.0) - kI * beta[0];

  double worst = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Complex p = project_mode(frames.frames[i], trace.states[i], mode);
    const Complex log_ratio = Complex(trace.log_scale[i], 0.0) - kI * beta[i] - log_c0;
    const Complex ratio = (p / p0) * std::exp(log_ratio);
    const double dev = std::abs(ratio - 1.0);
    if (std::isnan(dev) || dev > worst) worst = dev;
    if (std::isnan(worst)) break;
  }
  return worst;
}

std::vector<double> half_crossings(std::span<const double> grid, std::span<const double> p1r) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < grid.size() && i + 1 < p1r.size(); ++i) {
    const double a = p1r[i] - 0.5;
    const double b = p1r[i + 1] - 0.5;
    if (a == 0.0) {
      if (out.empty() || out.back() != grid[i]) out.push_back(grid[i]);
      continue;
    }
    if ((a < 0.0) != (b < 0.0) && b != 0.0) {
      const double w = a / (a - b);
      out.push_back(grid[i] + w * (grid[i + 1] - grid[i]));
    }
  }
  if (!p1r.empty() && p1r.size() == grid.size() && p1r.back() == 0.5) out.push_back(grid.back());
  return out;
}

ComparisonMetrics compare_real_ideal(const PopulationTrace& real, const PopulationTrace& ideal) {
  if (!same_grid(real.grid, ideal.grid) || real.p1r.size() != ideal.p1r.size())
    throw Error(ErrorKind::GridMismatch, "population traces do not share a grid");
  ComparisonMetrics m;
  double sq = 0.0;
  for (std::size_t i = 0; i < real.p1r.size(); ++i) {
    const double d = std::abs(real.p1r[i] - ideal.p1r[i]);
    if (std::isnan(d) || d > m.sup_norm) m.sup_norm = d;
    sq += d * d;
  }
  m.rms = real.p1r.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(real.p1r.size()));
  m.crossings_real = half_crossings(real.grid, real.p1r);
  m.crossings_ideal = half_crossings(ideal.grid, ideal.p1r);
  return m;
}

double sample_at(std::span<const double> grid, std::span<const double> values, double t) {
  if (grid.empty() || t < grid.front() || t > grid.back()) return std::numeric_limits<double>::quiet_NaN();
  const auto it = std::lower_bound(grid.begin(), grid.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - grid.begin());
  if (grid[j] == t || j == 0) return values[j];
  const double w = (t - grid[j - 1]) / (grid[j] - grid[j - 1]);
  return values[j - 1] + w * (values[j] - values[j - 1]);
}

}  // namespace nhad
