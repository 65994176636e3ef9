#pragma once

// Flat key=value experiment configuration with dotted keys and '#' comments.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bridgelab/grid.hpp"

namespace bridgelab::lab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { propagate, bridge, collapse, nlgt_sweep, curvature, check };
enum class OutputFormat { csv, json };

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::propagate: return "propagate";
    case Experiment::bridge: return "bridge";
    case Experiment::collapse: return "collapse";
    case Experiment::nlgt_sweep: return "nlgt-sweep";
    case Experiment::curvature: return "curvature";
    default: return "check";
  }
}

inline Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::propagate, Experiment::bridge, Experiment::collapse, Experiment::nlgt_sweep,
                 Experiment::curvature, Experiment::check})
    if (name == to_string(e)) return e;
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

inline OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + std::string(name) + "' (expected csv or json)");
}

struct GridParams {
  GridMode mode = GridMode::periodic;
  double x_min = -40.0;
  double x_max = 40.0;
  std::size_t n = 1024;

  Grid1D make() const { return Grid1D::make(mode, x_min, x_max, n); }
};

struct PhysicsParams {
  double hbar = 1.0;
  double mass = 1.0;
  double sigma = 1.0;
};

struct ScheduleParams {
  double t = 2.0;
  double tau = 1.0;
  double dt = 0.25;
  double dtau = 1e-3;
  std::size_t n_samples = 9;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::propagate;
  GridParams grid;
  PhysicsParams physics;
  ScheduleParams schedule;
  std::string output_path;  // empty: standard output
  OutputFormat format = OutputFormat::csv;
  std::uint64_t seed = 1;

  double x_m = 2.0;
  double width_floor = 1e-3;
  double alpha_min = -3.0;
  double alpha_max = 3.0;
  std::size_t alpha_count = 61;
  double p0 = 1.0;
  double bridge_tol = 1e-10;
  std::size_t bridge_max_iter = 10000;
  double curvature_delta = 1e-3;
};

/// Defaults that reproduce each experiment's reference setup.
inline ExperimentConfig defaults_for(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::propagate:
      break;
    case Experiment::bridge:
      c.grid = {GridMode::closed, -15.0, 15.0, 1024};
      c.schedule.n_samples = 5;
      break;
    case Experiment::collapse:
      c.grid = {GridMode::closed, -10.0, 10.0, 2049};
      break;
    case Experiment::nlgt_sweep:
      c.grid = {GridMode::periodic, -20.0, 20.0, 512};
      break;
    case Experiment::curvature:
      c.grid = {GridMode::periodic, -20.0, 20.0, 512};
      c.p0 = 0.0;
      break;
    case Experiment::check:
      c.grid = {GridMode::periodic, -24.0, 24.0, 1024};
      c.schedule.n_samples = 50;
      c.schedule.dt = 0.1;
      break;
  }
  return c;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError("key '" + key + "': '" + v + "' is not a finite decimal number");
  return out;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': '" + v + "' is not a nonnegative integer");
  return out;
}

}  // namespace detail

/// Parses key=value text into the experiment's defaults. Unknown keys and
/// repeated keys are errors.
inline ExperimentConfig parse_config(Experiment e, std::istream& in) {
  ExperimentConfig c = defaults_for(e);
  std::map<std::string, std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (!seen.emplace(key, value).second) throw ConfigError("key '" + key + "' given twice");

    auto num = [&] { return detail::parse_double(key, value); };
    auto count = [&] { return static_cast<std::size_t>(detail::parse_unsigned(key, value)); };
    if (key == "experiment") {
      if (parse_experiment(value) != e) throw ConfigError("config is for experiment '" + value + "'");
    } else if (key == "grid.x_min") c.grid.x_min = num();
    else if (key == "grid.x_max") c.grid.x_max = num();
    else if (key == "grid.n") c.grid.n = count();
    else if (key == "grid.mode") {
      if (value == "closed") c.grid.mode = GridMode::closed;
      else if (value == "periodic") c.grid.mode = GridMode::periodic;
      else throw ConfigError("grid.mode must be closed or periodic");
    } else if (key == "physics.hbar") c.physics.hbar = num();
    else if (key == "physics.mass") c.physics.mass = num();
    else if (key == "physics.sigma") c.physics.sigma = num();
    else if (key == "schedule.t") c.schedule.t = num();
    else if (key == "schedule.tau") c.schedule.tau = num();
    else if (key == "schedule.dt") c.schedule.dt = num();
    else if (key == "schedule.dtau") c.schedule.dtau = num();
    else if (key == "schedule.n_samples") c.schedule.n_samples = count();
    else if (key == "output.path") c.output_path = value;
    else if (key == "output.format") c.format = parse_format(value);
    else if (key == "seed") c.seed = detail::parse_unsigned(key, value);
    else if (key == "collapse.x_m") c.x_m = num();
    else if (key == "collapse.width_floor") c.width_floor = num();
    else if (key == "sweep.alpha_min") c.alpha_min = num();
    else if (key == "sweep.alpha_max") c.alpha_max = num();
    else if (key == "sweep.alpha_count") c.alpha_count = count();
    else if (key == "state.p0") c.p0 = num();
    else if (key == "bridge.tol") c.bridge_tol = num();
    else if (key == "bridge.max_iter") c.bridge_max_iter = count();
    else if (key == "curvature.delta") c.curvature_delta = num();
    else throw ConfigError("unknown key '" + key + "'");
  }
  return c;
}

inline ExperimentConfig load_config(Experiment e, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(e, in);
}

/// Checks every parameter before any computation starts.
inline void validate(const ExperimentConfig& c) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be positive");
  };
  positive(c.physics.hbar, "physics.hbar");
  positive(c.physics.mass, "physics.mass");
  positive(c.physics.sigma, "physics.sigma");
  positive(c.schedule.tau, "schedule.tau");
  positive(c.schedule.dt, "schedule.dt");
  positive(c.schedule.dtau, "schedule.dtau");
  positive(c.width_floor, "collapse.width_floor");
  positive(c.bridge_tol, "bridge.tol");
  positive(c.curvature_delta, "curvature.delta");
  if (c.schedule.t < 0.0) throw ConfigError("schedule.t must be nonnegative");
  if (c.schedule.n_samples < 2) throw ConfigError("schedule.n_samples must be at least 2");
  if (c.alpha_count < 1) throw ConfigError("sweep.alpha_count must be at least 1");
  if (c.alpha_count > 1 && !(c.alpha_max > c.alpha_min)) throw ConfigError("sweep.alpha_max must exceed alpha_min");
  if (c.bridge_max_iter < 1) throw ConfigError("bridge.max_iter must be positive");
  if (c.bridge_tol < 1e-12) throw ConfigError("bridge.tol must be at least 1e-12");
  try {
    (void)c.grid.make();
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("grid: ") + ex.what());
  }
}

}  // namespace bridgelab::lab
