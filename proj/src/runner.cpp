#include "nhad/runner.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace nhad {
namespace {

using json = nlohmann::ordered_json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::ostream& log_of(const RunContext& ctx) { return ctx.log ? *ctx.log : std::cerr; }

void bump(double& acc, double v) {
  if (std::isnan(v) || v > acc) acc = v;
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }
  CsvFile& operator<<(double v) {
    sep();
    out_ << format_double(v);
    return *this;
  }
  CsvFile& flag(bool v) {
    sep();
    out_ << (v ? '1' : '0');
    return *this;
  }
  CsvFile& text(const std::string& s) {
    sep();
    if (s.find_first_of(",\"\n") == std::string::npos) {
      out_ << s;
    } else {
      out_ << '"';
      for (char c : s) {
        if (c == '"') out_ << '"';
        out_ << (c == '\n' ? ' ' : c);
      }
      out_ << '"';
    }
    return *this;
  }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }
  ~CsvFile() { out_.flush(); }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ofstream out_;
  bool first_ = true;
};

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::filesystem::path prepare_out(const RunConfig& config, const RunContext& ctx) {
  std::filesystem::path dir = ctx.out_dir.empty() ? std::filesystem::path(config.output_dir) : ctx.out_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

// Runs a command body, reporting an escaping exception and mapping it to an exit code.
template <class Body>
int guarded(const RunContext& ctx, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    log_of(ctx) << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

json error_json(const Error& e) {
  return json{{"kind", to_string(e.kind())}, {"message", e.what()}};
}

json metrics_json(const ComparisonMetrics& m) {
  return json{{"sup_norm", m.sup_norm},
              {"rms", m.rms},
              {"crossings_real", m.crossings_real},
              {"crossings_ideal", m.crossings_ideal}};
}

double gamma_column(const RunConfig& config, double t) {
  return config.mode == SynthesisMode::Simple ? 0.0 : eval_gamma(config.gamma, t);
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return exit_code::usage;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::GridMismatch:
        return exit_code::usage;
      case ErrorKind::StepSizeUnderflow:
      case ErrorKind::GridTooCoarse:
      case ErrorKind::OrderViolation:
        return exit_code::numerical;
      default:
        return exit_code::parameter;
    }
  }
  return 1;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// ---- synthesis -------------------------------------------------------------

SynthesisRun synthesize_run(const RunConfig& config) {
  SynthesisRun run;
  run.grid = kernels::uniform_grid(config.t_end, config.samples);
  run.samples = kernels::synthesize_trace(config.model(), run.grid);
  const std::size_t n = run.grid.size();
  run.near_zero.assign(n, false);

  for (const auto& s : run.samples) {
    if (s.singular()) {
      ++run.singular_count;
      continue;
    }
    const FieldSample f = field_components(*s.design);
    bump(run.max_field, std::max({std::abs(f.b_x), std::abs(f.b_y), std::abs(f.b_z)}));
    bump(run.max_gap, std::abs(s.design->delta_e));
  }

  const double floor = config.synthesis.near_zero_fraction * run.max_gap;
  std::size_t near = 0;
  std::size_t usable = n - run.singular_count;
  std::size_t stretch_begin = 0, stretch_len = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = run.samples[i];
    run.near_zero[i] = !s.singular() && std::abs(s.design->delta_e) < floor;
    if (run.near_zero[i]) {
      ++near;
      if (stretch_len == 0) stretch_begin = i;
      ++stretch_len;
    }
    if (!run.near_zero[i] || i + 1 == n) {
      if (stretch_len > 0 && (!run.longest_near_zero || stretch_len > run.longest_near_zero->samples)) {
        run.longest_near_zero = NearZeroStretch{run.grid[stretch_begin], run.grid[stretch_begin + stretch_len - 1],
                                                stretch_len};
      }
      if (!run.near_zero[i]) stretch_len = 0;
    }
  }
  run.near_zero_share = usable > 0 ? static_cast<double>(near) / static_cast<double>(usable) : 0.0;
  run.consistency_warning = run.near_zero_share > config.synthesis.near_zero_warn_fraction;
  run.unusable = static_cast<double>(run.singular_count) >
                 config.synthesis.singular_abort_fraction * static_cast<double>(n);
  return run;
}

int run_synthesize(const RunConfig& config, const RunContext& ctx) {
  return guarded(ctx, [&] {
    const SynthesisRun run = synthesize_run(config);
    const auto dir = prepare_out(config, ctx);
    std::ostream& log = log_of(ctx);

    CsvFile fields(dir / "fields.csv", "t,re_bx,im_bx,re_by,im_by,re_bz,im_bz,abs_bx,abs_by,abs_bz,gamma,singular");
    CsvFile design(dir / "design.csv",
                   "t,rho,theta,re_alpha,im_alpha,omega1,omega2,omega3,re_delta_e,im_delta_e,re_delta,im_delta,"
                   "singular,near_zero_gap");
    for (std::size_t i = 0; i < run.grid.size(); ++i) {
      const double t = run.grid[i];
      const auto& s = run.samples[i];
      if (s.singular()) {
        fields << t;
        for (int k = 0; k < 9; ++k) fields << kNaN;
        fields << gamma_column(config, t);
        fields.flag(true).end_row();

        const AlphaValue a = eval_alpha(config.schedule, t);
        const OmegaFactors om = omega_factors(a.rho, a.theta);
        design << t << a.rho << a.theta << a.alpha.real() << a.alpha.imag() << om.omega1 << om.omega2 << om.omega3;
        for (int k = 0; k < 4; ++k) design << kNaN;
        design.flag(true).flag(false).end_row();
        continue;
      }
      const TwoLevelDesign& d = *s.design;
      const FieldSample f = field_components(d);
      fields << t << f.b_x.real() << f.b_x.imag() << f.b_y.real() << f.b_y.imag() << f.b_z.real() << f.b_z.imag()
             << std::abs(f.b_x) << std::abs(f.b_y) << std::abs(f.b_z) << d.gamma;
      fields.flag(false).end_row();
      design << t << d.alpha.rho << d.alpha.theta << d.alpha.alpha.real() << d.alpha.alpha.imag() << d.omega.omega1
             << d.omega.omega2 << d.omega.omega3 << d.delta_e.real() << d.delta_e.imag() << d.delta.real()
             << d.delta.imag();
      design.flag(false).flag(run.near_zero[i]).end_row();
    }

    json warnings = json::array();
    if (run.consistency_warning) {
      std::ostringstream msg;
      msg << "|Delta_E| is near zero on " << format_double(100.0 * run.near_zero_share)
          << "% of samples; the consistency condition fails and this parameter set is unreliable";
      if (run.longest_near_zero)
        msg << " (longest stretch t in [" << format_double(run.longest_near_zero->start) << ", "
            << format_double(run.longest_near_zero->end) << "])";
      warnings.push_back(msg.str());
      log << "warning: " << msg.str() << '\n';
    }

    json summary{{"samples", run.grid.size()},
                 {"singular_samples", run.singular_count},
                 {"max_field", run.max_field},
                 {"max_delta_e", run.max_gap},
                 {"near_zero_gap_fraction", run.near_zero_share},
                 {"consistency_warning", run.consistency_warning},
                 {"warnings", warnings}};
    if (run.longest_near_zero) {
      summary["longest_near_zero_gap"] = {{"start", run.longest_near_zero->start},
                                          {"end", run.longest_near_zero->end},
                                          {"samples", run.longest_near_zero->samples}};
    } else {
      summary["longest_near_zero_gap"] = nullptr;
    }
    write_json(dir / "summary.json", summary);

    if (run.unusable) {
      log << "error: " << run.singular_count << " of " << run.grid.size()
          << " samples are singular; parameter set unusable\n";
      return exit_code::parameter;
    }
    if (!ctx.quiet) {
      log << "synthesize: " << run.grid.size() << " samples, " << run.singular_count << " singular, max field "
          << format_double(run.max_field) << '\n';
    }
    return exit_code::ok;
  });
}

// ---- simulation -------------------------------------------------------------

Vector initial_state(const RunConfig& config) {
  Vector psi(2);
  if (config.initial_state == InitialState::BareApprox) {
    const double o = config.schedule.offset;
    psi << Complex(std::sqrt(1.0 - o * o), 0.0), Complex(o, 0.0);
  } else {
    psi = config.model().frame_at(0.0).right().col(0);
  }
  return psi / psi.norm();
}

SimulationRun simulate_run(const RunConfig& config) {
  const DesignModel model = config.model();
  const auto grid = kernels::uniform_grid(config.t_end, config.samples);
  IntegratorOptions opts;
  opts.rtol = config.rtol;
  SimulationRun run;
  run.trace = integrate_schrodinger([&model](double t) -> Matrix { return model.hamiltonian_at(t); },
                                    initial_state(config), grid, opts);
  run.real = relative_populations(run.trace);
  run.ideal = kernels::ideal_population_trace(config.schedule, grid, config.guards);
  return run;
}

int run_simulate(const RunConfig& config, const RunContext& ctx) {
  return guarded(ctx, [&] {
    const SimulationRun run = simulate_run(config);
    const auto dir = prepare_out(config, ctx);
    CsvFile csv(dir / "populations.csv", "t,p1r_real,p2r_real,p1r_ideal,p2r_ideal,log_scale");
    for (std::size_t i = 0; i < run.trace.size(); ++i) {
      csv << run.trace.grid[i] << run.real.p1r[i] << run.real.p2r[i] << run.ideal.p1r[i] << run.ideal.p2r[i]
          << run.trace.log_scale[i];
      csv.end_row();
    }
    if (!ctx.quiet) {
      log_of(ctx) << "simulate: " << run.trace.accepted_steps << " steps (" << run.trace.rejected_steps
                  << " rejected), p2r at t_end " << format_double(run.real.p2r.back()) << '\n';
    }
    return exit_code::ok;
  });
}

// ---- diagnostics -----------------------------------------------------------

CheckRun check_run(const RunConfig& config) {
  const DesignModel model = config.model();
  const auto grid = kernels::uniform_grid(config.t_end, config.samples);
  const auto samples = kernels::synthesize_trace(model, grid);
  const auto singular = std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.singular(); });
  if (singular > 0) {
    const auto first = std::find_if(samples.begin(), samples.end(), [](const auto& s) { return s.singular(); });
    std::ostringstream msg;
    msg << singular << " of " << samples.size() << " samples are singular (first at t = " << format_double(first->t)
        << ": " << first->message << ")";
    throw Error(ErrorKind::SynthesisSingularity, msg.str());
  }

  const FrameTrace frames = kernels::build_frame_trace(model, grid);
  const auto spectra = kernels::spectrum_trace(model, grid);
  const PhaseTrace phases = kernels::converged_phases(model, grid).phases;
  const SimulationRun sim = simulate_run(config);

  ReportOptions opts;
  opts.subgrid = config.check.subgrid;
  opts.propagator_threshold = config.check.propagator_threshold;
  opts.tracking_threshold = config.check.tracking_threshold;

  CheckRun out;
  out.report = adiabaticity_report(frames, spectra, phases, 0, opts, &sim.trace);
  out.tracking_error = out.report.tracking_error.value_or(kNaN);
  out.pass_coupling = out.report.max_coupling < config.check.coupling_threshold;
  out.pass_propagator = out.report.max_propagator < config.check.propagator_threshold;
  out.pass_tracking = out.tracking_error < config.check.tracking_threshold;
  return out;
}

int run_check(const RunConfig& config, const RunContext& ctx) {
  return guarded(ctx, [&] {
    const auto dir = prepare_out(config, ctx);
    CheckRun run;
    try {
      run = check_run(config);
    } catch (const Error& e) {
      write_json(dir / "report.json", json{{"status", "error"}, {"error", error_json(e)}});
      throw;
    }
    const AdiabaticityReport& r = run.report;
    json report{
        {"status", "ok"},
        {"target_mode", r.target + 1},
        {"lambda_mode", config.lambda_mode == LambdaMode::TanAlpha ? "tan_alpha" : "constant"},
        {"samples", config.samples},
        {"t_end", config.t_end},
        {"biorthogonality_max_residual", r.max_biorthogonality_residual},
        {"max_coupling_target_row", r.max_coupling},
        {"max_coupling_target_column", r.max_reverse_coupling},
        {"max_propagator", r.max_propagator},
        {"propagator_subgrid", config.check.subgrid},
        {"auxiliary_residual", {{"min", r.residual_min}, {"max", r.residual_max}, {"mean", r.residual_mean}}},
        {"mode_tracking_error", run.tracking_error},
        {"thresholds",
         {{"coupling", config.check.coupling_threshold},
          {"propagator", config.check.propagator_threshold},
          {"tracking", config.check.tracking_threshold}}},
        {"pass",
         {{"coupling", run.pass_coupling},
          {"propagator", run.pass_propagator},
          {"tracking", run.pass_tracking},
          {"overall", run.pass()}}},
    };
    write_json(dir / "report.json", report);
    if (!ctx.quiet) log_of(ctx) << "check: " << (run.pass() ? "pass" : "fail") << '\n';
    return exit_code::ok;
  });
}

int run_compare(const RunConfig& config, const std::optional<RunConfig>& reference, const RunContext& ctx) {
  return guarded(ctx, [&] {
    const SimulationRun primary = simulate_run(config);
    const ComparisonMetrics pm = compare_real_ideal(primary.real, primary.ideal);
    json out{{"primary", metrics_json(pm)}};
    out["primary"]["p2r_real_at_pi"] = sample_at(primary.real.grid, primary.real.p2r, kPi);
    if (reference) {
      const SimulationRun ref = simulate_run(*reference);
      const ComparisonMetrics cross = compare_real_ideal(primary.real, ref.real);
      const ComparisonMetrics rm = compare_real_ideal(ref.real, ref.ideal);
      const ComparisonMetrics shared = compare_real_ideal(ref.real, primary.ideal);
      out["reference"] = metrics_json(rm);
      out["reference"]["p2r_real_at_pi"] = sample_at(ref.real.grid, ref.real.p2r, kPi);
      out["reference_vs_primary_ideal"] = metrics_json(shared);
      out["primary_vs_reference"] = json{{"sup_norm", cross.sup_norm},
                                         {"rms", cross.rms},
                                         {"crossings_primary", cross.crossings_real},
                                         {"crossings_reference", cross.crossings_ideal}};
    }
    const auto dir = prepare_out(config, ctx);
    write_json(dir / "metrics.json", out);
    if (!ctx.quiet) log_of(ctx) << "compare: sup-norm vs ideal " << format_double(pm.sup_norm) << '\n';
    return exit_code::ok;
  });
}

// ---- sweeps ------------------------------------------------------------------

std::vector<SweepPoint> sweep_points(const RunConfig& config) {
  const SweepSettings& s = config.sweep;
  auto axis = [](const std::vector<double>& values, double fallback) {
    return values.empty() ? std::vector<double>{fallback} : values;
  };
  const double base_gamma = config.gamma.mode == GammaMode::Constant ? config.gamma.value : config.gamma.peak;
  if (!s.mu_nu.empty() && (!s.mu.empty() || !s.nu.empty()))
    throw UsageError("sweep.mu_nu cannot be combined with sweep.mu or sweep.nu");

  std::vector<std::pair<double, double>> freqs;
  if (!s.mu_nu.empty()) {
    for (double f : s.mu_nu) freqs.emplace_back(f, f);
  } else {
    for (double mu : axis(s.mu, config.schedule.rho_frequency))
      for (double nu : axis(s.nu, config.schedule.theta_frequency)) freqs.emplace_back(mu, nu);
  }
  const auto xis = axis(s.xi, config.schedule.rho_amplitude);
  const auto zetas = axis(s.zeta, config.schedule.theta_offset);
  const auto gammas = axis(s.gamma, base_gamma);

  const std::size_t total = freqs.size() * xis.size() * zetas.size() * gammas.size();
  if (total > s.max_runs)
    throw UsageError("sweep has " + std::to_string(total) + " runs, above sweep.max_runs = " +
                     std::to_string(s.max_runs));

  std::vector<SweepPoint> points;
  points.reserve(total);
  for (const auto& [mu, nu] : freqs)
    for (double xi : xis)
      for (double zeta : zetas)
        for (double g : gammas) points.push_back({mu, nu, xi, zeta, g});
  for (const auto& p : points) {
    if (!std::isfinite(p.mu) || !std::isfinite(p.nu) || !std::isfinite(p.xi) || !std::isfinite(p.zeta) ||
        !std::isfinite(p.gamma))
      throw UsageError("sweep axes must be finite");
  }
  return points;
}

RunConfig apply_point(const RunConfig& config, const SweepPoint& point) {
  RunConfig c = config;
  c.schedule.rho_frequency = point.mu;
  c.schedule.theta_frequency = point.nu;
  c.schedule.rho_amplitude = point.xi;
  c.schedule.theta_offset = point.zeta;
  if (c.gamma.mode == GammaMode::Constant) c.gamma.value = point.gamma;
  else c.gamma.peak = point.gamma;
  return c;
}

namespace {

SweepRow sweep_one(const RunConfig& base, const SweepPoint& point) {
  SweepRow row;
  row.point = point;
  row.inversion_time = row.p2r_at_pi = row.p2r_peak_time = kNaN;
  row.max_field = row.max_g = row.sup_vs_ideal = kNaN;
  try {
    const RunConfig c = apply_point(base, point);
    c.validate();
    const SynthesisRun syn = synthesize_run(c);
    row.max_field = syn.max_field;

    const SimulationRun sim = simulate_run(c);
    const ComparisonMetrics m = compare_real_ideal(sim.real, sim.ideal);
    row.sup_vs_ideal = m.sup_norm;
    if (!m.crossings_real.empty()) row.inversion_time = m.crossings_real.front();
    row.p2r_at_pi = sample_at(sim.real.grid, sim.real.p2r, kPi);
    row.p2r_peak_time = sim.real.grid[argmax(sim.real.p2r)];

    if (syn.singular_count > 0) throw Error(ErrorKind::SynthesisSingularity, "singular samples; max|g| unavailable");
    const DesignModel model = c.model();
    const FrameTrace frames = kernels::build_frame_trace(model, syn.grid);
    const PhaseTrace phases = kernels::converged_phases(model, syn.grid).phases;
    const auto idx = subgrid_indices(syn.grid.size(), c.check.subgrid);
    const Matrix g = kernels::propagator_grid(frames, phases, 0, idx);
    row.max_g = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) bump(row.max_g, std::abs(g.data()[i]));
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_run(const RunConfig& config) {
  const auto points = sweep_points(config);
  std::vector<SweepRow> rows(points.size());
  const int workers = config.sweep.workers > 0 ? static_cast<int>(config.sweep.workers) : omp_get_max_threads();
  const auto count = static_cast<long long>(points.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long long i = 0; i < count; ++i) {
    rows[static_cast<std::size_t>(i)] = sweep_one(config, points[static_cast<std::size_t>(i)]);
  }
  return rows;
}

int run_sweep(const RunConfig& config, const RunContext& ctx) {
  return guarded(ctx, [&] {
    const auto rows = sweep_run(config);
    const auto dir = prepare_out(config, ctx);
    CsvFile csv(dir / "sweep.csv",
                "run,mu,nu,xi,zeta,gamma,inversion_time,p2r_at_pi,p2r_peak_time,max_field,max_g,sup_vs_ideal,error");
    std::size_t failed = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const SweepRow& r = rows[i];
      csv << static_cast<double>(i) << r.point.mu << r.point.nu << r.point.xi << r.point.zeta << r.point.gamma
          << r.inversion_time << r.p2r_at_pi << r.p2r_peak_time << r.max_field << r.max_g << r.sup_vs_ideal;
      csv.text(r.error).end_row();
      if (!r.error.empty()) ++failed;
    }
    if (!ctx.quiet) log_of(ctx) << "sweep: " << rows.size() << " runs, " << failed << " with errors\n";
    return exit_code::ok;
  });
}

}  // namespace nhad
