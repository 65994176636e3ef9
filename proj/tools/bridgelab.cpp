// bridgelab <experiment> --config <path> [--out <path>] [--format csv|json] [--seed N]

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bridgelab/lab/experiments.hpp"

namespace {

enum ExitCode { kOk = 0, kInvariantFailure = 1, kConfigError = 2, kNonConvergence = 3 };

// The output is assembled in memory and written through a temporary file, so
// a failed run never leaves a partial result behind.
void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  const std::string tmp = path + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << text;
    if (!out.flush()) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("failed writing '" + path + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

int main(int argc, char** argv) {
  namespace lab = bridgelab::lab;
  CLI::App app{"Schrödinger bridge / unitary evolution numerical laboratory"};
  std::string experiment, config_path, out_path, format;
  std::optional<std::uint64_t> seed;
  app.add_option("experiment", experiment, "propagate | bridge | collapse | nlgt-sweep | curvature | check")
      ->required();
  app.add_option("--config", config_path, "key=value configuration file")->required();
  app.add_option("--out", out_path, "output path (default: config output.path, else stdout)");
  app.add_option("--format", format, "csv or json (overrides output.format)");
  app.add_option("--seed", seed, "random seed (overrides config seed)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  lab::ExperimentConfig config;
  try {
    const auto which = lab::parse_experiment(experiment);
    config = lab::load_config(which, config_path);
    if (!out_path.empty()) config.output_path = out_path;
    if (!format.empty()) config.format = lab::parse_format(format);
    if (seed) config.seed = *seed;
    lab::validate(config);
  } catch (const lab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const auto result = lab::run_experiment(config);
    write_output(config.output_path, lab::serialize(result.record, config.format));
    if (!result.invariants_hold) {
      std::cerr << "invariant failure: see rows with status 'fail'\n";
      return kInvariantFailure;
    }
    return kOk;
  } catch (const bridgelab::NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const lab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kInvariantFailure;
  }
}
