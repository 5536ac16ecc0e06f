#include "nhad/adiabaticity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "nhad/dynamics.hpp"
#include "nhad/kernels.hpp"

namespace nhad {
namespace {

constexpr Complex kI{0.0, 1.0};

struct Panel {
  Complex first_half;
  Complex full;
};

// Integrals of the parabola through (x0,f0), (x1,f1), (x2,f2) over [x0,x1] and [x0,x2].
Panel parabola_panel(double x0, double x1, double x2, Complex f0, Complex f1, Complex f2) {
  const double h0 = x1 - x0;
  const double h1 = x2 - x1;
  const double span = h0 + h1;
  const Complex b = (f1 - f0) / h0;
  const Complex c = ((f2 - f1) / h1 - b) / span;
  const Complex first = f0 * h0 + b * (h0 * h0 / 2.0) - c * (h0 * h0 * h0 / 6.0);
  const Complex full = f0 * span + b * (span * span / 2.0) + c * (span * span * span / 3.0 - h0 * span * span / 2.0);
  return {first, full};
}

// max that keeps a NaN once seen
void bump(double& acc, double v) {
  if (std::isnan(v) || v > acc) acc = v;
}

void require_sample(const FrameTrace& trace, std::size_t sample) {
  if (sample >= trace.size()) throw Error(ErrorKind::IndexOutOfRange, "sample " + std::to_string(sample));
}

void require_mode(std::size_t dim, std::size_t mode) {
  if (mode >= dim) throw Error(ErrorKind::IndexOutOfRange, "mode " + std::to_string(mode));
}

void require_phases(const FrameTrace& trace, const PhaseTrace& phases) {
  if (phases.modes() != trace.dim() || phases.grid.size() != trace.size())
    throw Error(ErrorKind::DimensionMismatch, "phase trace does not match frame trace");
}

std::vector<std::size_t> others(std::size_t dim, std::size_t target) {
  std::vector<std::size_t> q;
  for (std::size_t m = 0; m < dim; ++m)
    if (m != target) q.push_back(m);
  return q;
}

// Endpoint-sampled D for the Q block at one sample.
Matrix q_block(const FrameTrace& trace, const PhaseTrace& phases, const std::vector<std::size_t>& q,
               std::size_t sample) {
  const auto n = static_cast<Eigen::Index>(q.size());
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = 0; l < n; ++l) {
      if (j == l) continue;
      const std::size_t mj = q[static_cast<std::size_t>(j)];
      const std::size_t ml = q[static_cast<std::size_t>(l)];
      d(j, l) = -kI * trace.coupling(sample, mj, ml) * std::exp(kI * (phases.beta[ml][sample] - phases.beta[mj][sample]));
    }
  }
  return d;
}

}  // namespace

void FrameTrace::validate() const {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "frame trace is empty");
  if (frames.size() != grid.size() || frame_dots.size() != grid.size())
    throw Error(ErrorKind::DimensionMismatch, "frame trace arrays differ in length");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::InvalidArgument, "grid must be strictly increasing");
  const std::size_t n = dim();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (frames[i].dim() != n || static_cast<std::size_t>(frame_dots[i].rows()) != n ||
        static_cast<std::size_t>(frame_dots[i].cols()) != n)
      throw Error(ErrorKind::DimensionMismatch, "frame dimension changes along the trace");
  }
}

Complex FrameTrace::coupling(std::size_t sample, std::size_t row, std::size_t col) const {
  const auto& left = frames[sample].left();
  const auto& dot = frame_dots[sample];
  return left.row(static_cast<Eigen::Index>(row)).transpose().cwiseProduct(dot.col(static_cast<Eigen::Index>(col))).sum();
}

std::vector<Complex> cumulative_simpson(std::span<const double> x, std::span<const Complex> f) {
  if (x.size() != f.size()) throw Error(ErrorKind::DimensionMismatch, "grid and values differ in length");
  const std::size_t n = x.size();
  std::vector<Complex> out(n, Complex{});
  if (n < 2) return out;
  if (n == 2) {
    out[1] = 0.5 * (f[0] + f[1]) * (x[1] - x[0]);
    return out;
  }
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const Panel p = parabola_panel(x[i], x[i + 1], x[i + 2], f[i], f[i + 1], f[i + 2]);
    out[i + 1] = out[i] + p.first_half;
    out[i + 2] = out[i] + p.full;
  }
  if (i + 1 < n) {
    // odd interval count: second half of the last three-point parabola
    const Panel p = parabola_panel(x[n - 3], x[n - 2], x[n - 1], f[n - 3], f[n - 2], f[n - 1]);
    out[n - 1] = out[n - 2] + (p.full - p.first_half);
  }
  return out;
}

std::vector<Complex> adiabatic_phase(const FrameTrace& trace, std::span<const Spectrum> spectra, std::size_t mode,
                                     const PhaseOptions& options) {
  trace.validate();
  require_mode(trace.dim(), mode);
  if (spectra.size() != trace.size()) throw Error(ErrorKind::DimensionMismatch, "one spectrum per sample required");
  const std::size_t n = trace.size();
  std::vector<Complex> integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (spectra[i].size() != trace.dim()) throw Error(ErrorKind::DimensionMismatch, "spectrum size mismatch");
    integrand[i] = -spectra[i].values[mode] + kI * trace.coupling(i, mode, mode);
  }
  std::vector<Complex> beta = cumulative_simpson(trace.grid, integrand);

  if (options.check_refinement && n >= 5) {
    std::vector<double> coarse_grid;
    std::vector<Complex> coarse_values;
    for (std::size_t i = 0; i < n; i += 2) {
      coarse_grid.push_back(trace.grid[i]);
      coarse_values.push_back(integrand[i]);
    }
    const std::vector<Complex> coarse = cumulative_simpson(coarse_grid, coarse_values);
    for (std::size_t k = 0; k < coarse.size(); ++k) {
      const Complex fine = beta[2 * k];
      if (std::abs(fine - coarse[k]) > options.refinement_tol * (1.0 + std::abs(fine)))
        throw Error(ErrorKind::GridTooCoarse,
                    "adiabatic phase not converged at t=" + std::to_string(trace.grid[2 * k]));
    }
  }
  return beta;
}

PhaseTrace adiabatic_phases(const FrameTrace& trace, std::span<const Spectrum> spectra, const PhaseOptions& options) {
  PhaseTrace out;
  out.grid = trace.grid;
  for (std::size_t m = 0; m < trace.dim(); ++m) out.beta.push_back(adiabatic_phase(trace, spectra, m, options));
  return out;
}

double auxiliary_residual(const FrameTrace& trace, Complex e_n, std::size_t mode, std::size_t sample) {
  require_sample(trace, sample);
  require_mode(trace.dim(), mode);
  return -e_n.imag() + trace.coupling(sample, mode, mode).real();
}

Matrix rotating_hamiltonian(const FrameTrace& trace, const PhaseTrace& phases, std::size_t sample) {
  require_sample(trace, sample);
  require_phases(trace, phases);
  const auto n = static_cast<Eigen::Index>(trace.dim());
  Matrix h = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index m = 0; m < n; ++m) {
      if (k == m) continue;
      const auto uk = static_cast<std::size_t>(k);
      const auto um = static_cast<std::size_t>(m);
      h(k, m) = -kI * trace.coupling(sample, uk, um) * std::exp(kI * (phases.beta[um][sample] - phases.beta[uk][sample]));
    }
  }
  return h;
}

PQPartition pq_partition(const FrameTrace& trace, const PhaseTrace& phases, std::size_t target, std::size_t sample) {
  require_sample(trace, sample);
  require_phases(trace, phases);
  require_mode(trace.dim(), target);
  if (trace.dim() < 2) throw Error(ErrorKind::DimensionMismatch, "P-Q partition needs at least two modes");
  const auto q = others(trace.dim(), target);
  const auto nq = static_cast<Eigen::Index>(q.size());
  PQPartition p{target, Vector(nq), Vector(nq), q_block(trace, phases, q, sample)};
  const Complex bt = phases.beta[target][sample];
  for (Eigen::Index j = 0; j < nq; ++j) {
    const std::size_t m = q[static_cast<std::size_t>(j)];
    const Complex bm = phases.beta[m][sample];
    p.r_vector(j) = -kI * trace.coupling(sample, target, m) * std::exp(kI * (bm - bt));
    p.w_vector(j) = -kI * trace.coupling(sample, m, target) * std::exp(kI * (bt - bm));
  }
  return p;
}

Matrix ordered_evolution(const FrameTrace& trace, const PhaseTrace& phases, std::size_t target, std::size_t t_sample,
                         std::size_t s_sample) {
  require_sample(trace, t_sample);
  require_sample(trace, s_sample);
  require_phases(trace, phases);
  require_mode(trace.dim(), target);
  if (s_sample > t_sample) throw Error(ErrorKind::OrderViolation, "G(t,s) requires s <= t");
  const auto q = others(trace.dim(), target);
  const auto nq = static_cast<Eigen::Index>(q.size());
  Matrix g = Matrix::Identity(nq, nq);
  if (nq < 2) return g;  // a single Q mode has D = 0
  Matrix d_prev = q_block(trace, phases, q, s_sample);
  for (std::size_t k = s_sample; k < t_sample; ++k) {
    Matrix d_next = q_block(trace, phases, q, k + 1);
    const double dt = trace.grid[k + 1] - trace.grid[k];
    const Matrix step = (Complex(0.0, -0.5 * dt) * (d_prev + d_next)).exp();
    g = step * g;
    d_prev = std::move(d_next);
  }
  return g;
}

Complex propagator_g(const FrameTrace& trace, const PhaseTrace& phases, std::size_t target, std::size_t t_sample,
                     std::size_t s_sample) {
  const Matrix g = ordered_evolution(trace, phases, target, t_sample, s_sample);
  const auto q = others(trace.dim(), target);
  const Complex bt_t = phases.beta[target][t_sample];
  const Complex bt_s = phases.beta[target][s_sample];
  Complex total{};
  for (std::size_t j = 0; j < q.size(); ++j) {
    const Complex r = trace.coupling(t_sample, target, q[j]);
    if (r == Complex{}) continue;
    for (std::size_t l = 0; l < q.size(); ++l) {
      const Complex w = trace.coupling(s_sample, q[l], target);
      const Complex gl = g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));
      if (w == Complex{} || gl == Complex{}) continue;
      const Complex exponent = kI * (phases.beta[q[j]][t_sample] - bt_t + bt_s - phases.beta[q[l]][s_sample]);
      total += -r * gl * w * std::exp(exponent);
    }
  }
  return total;
}

Complex propagator_g_two_level(const FrameTrace& trace, const PhaseTrace& phases, std::size_t target,
                               std::size_t t_sample, std::size_t s_sample) {
  require_sample(trace, t_sample);
  require_sample(trace, s_sample);
  require_phases(trace, phases);
  if (trace.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "closed form applies to two levels only");
  require_mode(2, target);
  if (s_sample > t_sample) throw Error(ErrorKind::OrderViolation, "g(t,s) requires s <= t");
  const std::size_t other = 1 - target;
  const Complex a = trace.coupling(t_sample, target, other);
  const Complex b = trace.coupling(s_sample, other, target);
  if (a == Complex{} || b == Complex{}) return Complex{};
  const Complex rel_t = phases.beta[other][t_sample] - phases.beta[target][t_sample];
  const Complex rel_s = phases.beta[other][s_sample] - phases.beta[target][s_sample];
  return -a * b * std::exp(kI * (rel_t - rel_s));
}

std::vector<std::size_t> subgrid_indices(std::size_t n, std::size_t count) {
  std::vector<std::size_t> idx;
  if (n == 0 || count == 0) return idx;
  if (count >= n || count == 1) {
    for (std::size_t i = 0; i < (count == 1 ? 1 : n); ++i) idx.push_back(i);
    return idx;
  }
  for (std::size_t k = 0; k < count; ++k) {
    const double pos = static_cast<double>(k) * static_cast<double>(n - 1) / static_cast<double>(count - 1);
    idx.push_back(static_cast<std::size_t>(std::llround(pos)));
  }
  return idx;
}

AdiabaticityReport adiabaticity_report(const FrameTrace& trace, std::span<const Spectrum> spectra,
                                       const PhaseTrace& phases, std::size_t target, const ReportOptions& options,
                                       const ScaledStateTrace* sim) {
  trace.validate();
  require_phases(trace, phases);
  require_mode(trace.dim(), target);
  if (spectra.size() != trace.size()) throw Error(ErrorKind::DimensionMismatch, "one spectrum per sample required");

  AdiabaticityReport rep;
  rep.target = target;
  rep.auxiliary_residuals.resize(trace.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    bump(rep.max_biorthogonality_residual, check_biorthogonality(trace.frames[i]));
    for (std::size_t m = 0; m < trace.dim(); ++m) {
      if (m == target) continue;
      bump(rep.max_coupling, std::abs(trace.coupling(i, target, m)));
      bump(rep.max_reverse_coupling, std::abs(trace.coupling(i, m, target)));
    }
    const double r = auxiliary_residual(trace, spectra[i].values[target], target, i);
    rep.auxiliary_residuals[i] = r;
    sum += r;
  }
  const auto [lo, hi] = std::minmax_element(rep.auxiliary_residuals.begin(), rep.auxiliary_residuals.end());
  rep.residual_min = *lo;
  rep.residual_max = *hi;
  rep.residual_mean = sum / static_cast<double>(trace.size());

  const auto idx = subgrid_indices(trace.size(), options.subgrid);
  const Matrix grid = kernels::propagator_grid(trace, phases, target, idx);
  for (Eigen::Index a = 0; a < grid.rows(); ++a)
    for (Eigen::Index b = 0; b <= a; ++b) bump(rep.max_propagator, std::abs(grid(a, b)));

  if (sim != nullptr) rep.tracking_error = mode_tracking_error(*sim, trace, phases, target);
  rep.non_adiabatic = rep.max_propagator > options.propagator_threshold ||
                      (rep.tracking_error && *rep.tracking_error > options.tracking_threshold);
  return rep;
}

}  // namespace nhad
