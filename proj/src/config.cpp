#include "nhad/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace nhad {
namespace {

namespace pt = boost::property_tree;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "schedule.o", "schedule.xi", "schedule.mu", "schedule.zeta", "schedule.nu",
      "gamma.mode", "gamma.value", "gamma.omega_prime", "gamma.t0", "gamma.T",
      "run.mode", "run.re_delta_e", "run.lambda_mode", "run.lambda_constant", "run.initial_state",
      "run.t_end", "run.samples", "run.rtol", "run.output_dir",
      "guards.omega1_floor", "guards.cos_alpha_floor", "guards.det_floor",
      "check.subgrid", "check.coupling_threshold", "check.propagator_threshold", "check.tracking_threshold",
      "synthesize.near_zero_fraction", "synthesize.near_zero_warn_fraction", "synthesize.singular_abort_fraction",
      "sweep.mu_nu", "sweep.mu", "sweep.nu", "sweep.xi", "sweep.zeta", "sweep.gamma", "sweep.max_runs",
      "sweep.workers",
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_number(item));
  }
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_number(text);
  if (v < 0.0 || v != std::floor(v) || v > 1e12) throw UsageError(key + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

template <class Setter>
void with(const pt::ptree& tree, const std::string& key, Setter&& set) {
  if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'))) set(trim(*v));
}

}  // namespace

DesignModel RunConfig::model() const {
  DesignModel m;
  m.schedule = schedule;
  m.gamma = gamma;
  m.mode = mode;
  m.re_delta_e = re_delta_e;
  m.lambda_mode = lambda_mode;
  m.lambda_constant = Complex(lambda_constant, 0.0);
  m.guards = guards;
  return m;
}

void RunConfig::validate() const {
  try {
    schedule.validate();
    gamma.validate();
    guards.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (samples < 2) throw UsageError("run.samples must be >= 2");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw UsageError("run.t_end must be > 0");
  if (!(rtol > 1e-13 && rtol < 1e-3)) throw UsageError("run.rtol must lie in (1e-13, 1e-3)");
  if (mode == SynthesisMode::Simple && (re_delta_e == 0.0 || !std::isfinite(re_delta_e)))
    throw UsageError("run.re_delta_e must be finite and nonzero");
  if (lambda_mode == LambdaMode::Constant && lambda_constant == 0.0)
    throw UsageError("run.lambda_constant must be nonzero");
  if (check.subgrid < 1) throw UsageError("check.subgrid must be >= 1");
}

double parse_number(std::string_view text) {
  static const std::regex pattern(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-])?\s*\*?\s*(pi)?\s*(?:/\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))?\s*$)");
  const std::string s(text);
  std::smatch m;
  if (s.empty() || !std::regex_match(s, m, pattern) || (!m[2].matched && (!m[1].matched || m[1].str() == "+" || m[1].str() == "-")))
    throw UsageError("not a number: '" + s + "'");
  double v = 1.0;
  if (m[1].matched) {
    const std::string lead = m[1].str();
    v = (lead == "+" || lead == "-") ? (lead == "-" ? -1.0 : 1.0) : std::stod(lead);
  }
  if (m[2].matched) v *= kPi;
  if (m[3].matched) {
    const double d = std::stod(m[3].str());
    if (d == 0.0) throw UsageError("division by zero in '" + s + "'");
    v /= d;
  }
  return v;
}

RunConfig parse_config(std::string_view ini_text, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(ini_text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    tree.put(pt::ptree::path_type(trim(kv.substr(0, eq)), '.'), trim(kv.substr(eq + 1)));
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw UsageError("unknown config key '" + section + "' (keys live in sections)");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!known_keys().contains(full)) throw UsageError("unknown config key '" + full + "'");
    }
  }

  RunConfig c;
  auto num = [&](const std::string& key, double& field) {
    with(tree, key, [&](const std::string& v) { field = parse_number(v); });
  };
  num("schedule.o", c.schedule.offset);
  num("schedule.xi", c.schedule.rho_amplitude);
  num("schedule.mu", c.schedule.rho_frequency);
  num("schedule.zeta", c.schedule.theta_offset);
  num("schedule.nu", c.schedule.theta_frequency);

  with(tree, "gamma.mode", [&](const std::string& v) {
    const std::string m = lower(v);
    if (m == "constant") c.gamma.mode = GammaMode::Constant;
    else if (m == "gaussian") c.gamma.mode = GammaMode::Gaussian;
    else throw UsageError("gamma.mode must be constant or gaussian");
  });
  num("gamma.value", c.gamma.value);
  num("gamma.omega_prime", c.gamma.peak);
  num("gamma.t0", c.gamma.center);
  num("gamma.T", c.gamma.width);

  with(tree, "run.mode", [&](const std::string& v) {
    const std::string m = lower(v);
    if (m == "dissipative") c.mode = SynthesisMode::Dissipative;
    else if (m == "simple") c.mode = SynthesisMode::Simple;
    else throw UsageError("run.mode must be dissipative or simple");
  });
  num("run.re_delta_e", c.re_delta_e);
  with(tree, "run.lambda_mode", [&](const std::string& v) {
    const std::string m = lower(v);
    if (m == "tan_alpha") c.lambda_mode = LambdaMode::TanAlpha;
    else if (m == "constant") c.lambda_mode = LambdaMode::Constant;
    else throw UsageError("run.lambda_mode must be tan_alpha or constant");
  });
  num("run.lambda_constant", c.lambda_constant);
  with(tree, "run.initial_state", [&](const std::string& v) {
    const std::string m = lower(v);
    if (m == "eigenvector") c.initial_state = InitialState::Eigenvector;
    else if (m == "bare_approx") c.initial_state = InitialState::BareApprox;
    else throw UsageError("run.initial_state must be eigenvector or bare_approx");
  });
  num("run.t_end", c.t_end);
  with(tree, "run.samples", [&](const std::string& v) { c.samples = parse_count("run.samples", v); });
  num("run.rtol", c.rtol);
  with(tree, "run.output_dir", [&](const std::string& v) { c.output_dir = v; });

  num("guards.omega1_floor", c.guards.omega1_floor);
  num("guards.cos_alpha_floor", c.guards.cos_alpha_floor);
  num("guards.det_floor", c.guards.det_floor);

  with(tree, "check.subgrid", [&](const std::string& v) { c.check.subgrid = parse_count("check.subgrid", v); });
  num("check.coupling_threshold", c.check.coupling_threshold);
  num("check.propagator_threshold", c.check.propagator_threshold);
  num("check.tracking_threshold", c.check.tracking_threshold);

  num("synthesize.near_zero_fraction", c.synthesis.near_zero_fraction);
  num("synthesize.near_zero_warn_fraction", c.synthesis.near_zero_warn_fraction);
  num("synthesize.singular_abort_fraction", c.synthesis.singular_abort_fraction);

  auto list = [&](const std::string& key, std::vector<double>& field) {
    with(tree, key, [&](const std::string& v) { field = parse_list(v); });
  };
  list("sweep.mu_nu", c.sweep.mu_nu);
  list("sweep.mu", c.sweep.mu);
  list("sweep.nu", c.sweep.nu);
  list("sweep.xi", c.sweep.xi);
  list("sweep.zeta", c.sweep.zeta);
  list("sweep.gamma", c.sweep.gamma);
  with(tree, "sweep.max_runs", [&](const std::string& v) { c.sweep.max_runs = parse_count("sweep.max_runs", v); });
  with(tree, "sweep.workers", [&](const std::string& v) { c.sweep.workers = parse_count("sweep.workers", v); });

  c.validate();
  return c;
}

RunConfig load_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides) {
  std::string text;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw UsageError("cannot read config '" + *path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_config(text, overrides);
}

}  // namespace nhad
