#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nhad/adiabaticity.hpp"
#include "nhad/config.hpp"
#include "nhad/dynamics.hpp"
#include "nhad/kernels.hpp"

namespace nhad {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int parameter = 2;
inline constexpr int numerical = 3;
inline constexpr int usage = 64;
}  // namespace exit_code

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

/// Shortest round-trip-safe text with 17 significant digits; "nan"/"inf" for
/// non-finite values.
std::string format_double(double v);

struct RunContext {
  std::filesystem::path out_dir;
  bool quiet = false;
  std::ostream* log = nullptr;  // defaults to std::cerr
};

// ---- in-memory results ---------------------------------------------------

struct NearZeroStretch {
  double start = 0.0;
  double end = 0.0;
  std::size_t samples = 0;
};

struct SynthesisRun {
  std::vector<double> grid;
  std::vector<kernels::SynthesisSample> samples;
  std::vector<bool> near_zero;
  std::size_t singular_count = 0;
  double max_field = 0.0;  // over non-singular samples and all field components
  double max_gap = 0.0;    // max |Delta_E|
  double near_zero_share = 0.0;
  std::optional<NearZeroStretch> longest_near_zero;
  bool consistency_warning = false;
  bool unusable = false;  // singular share above the abort fraction
};

SynthesisRun synthesize_run(const RunConfig& config);

struct SimulationRun {
  ScaledStateTrace trace;
  PopulationTrace real;
  PopulationTrace ideal;
};

/// Start vector selected by `config.initial_state`, unit-normalized.
Vector initial_state(const RunConfig& config);

SimulationRun simulate_run(const RunConfig& config);

struct CheckRun {
  AdiabaticityReport report;
  double tracking_error = 0.0;
  bool pass_coupling = false;
  bool pass_propagator = false;
  bool pass_tracking = false;
  bool pass() const { return pass_coupling && pass_propagator && pass_tracking; }
};

/// Throws SynthesisSingularity if any grid point is singular.
CheckRun check_run(const RunConfig& config);

struct SweepPoint {
  double mu = 0.0;
  double nu = 0.0;
  double xi = 0.0;
  double zeta = 0.0;
  double gamma = 0.0;
};

struct SweepRow {
  SweepPoint point;
  double inversion_time = 0.0;  // first 0.5 crossing of the real trace, NaN if none
  double p2r_at_pi = 0.0;
  double p2r_peak_time = 0.0;
  double max_field = 0.0;
  double max_g = 0.0;
  double sup_vs_ideal = 0.0;
  std::string error;
};

/// Cartesian product of the non-empty sweep axes; throws UsageError above
/// the run cap.
std::vector<SweepPoint> sweep_points(const RunConfig& config);

RunConfig apply_point(const RunConfig& config, const SweepPoint& point);

std::vector<SweepRow> sweep_run(const RunConfig& config);

// ---- commands: write files, return an exit code ---------------------------

int run_synthesize(const RunConfig& config, const RunContext& ctx);
int run_simulate(const RunConfig& config, const RunContext& ctx);
int run_check(const RunConfig& config, const RunContext& ctx);
int run_compare(const RunConfig& config, const std::optional<RunConfig>& reference, const RunContext& ctx);
int run_sweep(const RunConfig& config, const RunContext& ctx);

}  // namespace nhad
