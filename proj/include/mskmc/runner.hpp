#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mskmc/models.hpp"
#include "mskmc/simulate.hpp"
#include "mskmc/stats.hpp"

namespace mskmc {

/// Everything a command needs; field names mirror the CLI long options.
struct RunConfig {
  std::string preset;      // bundled preset name
  std::string model_file;  // YAML model definition, used when preset is empty
  PresetParams params;
  std::vector<double> epsilons;
  std::vector<std::int64_t> initial;  // optional (x, z) override
  std::optional<double> total_energy;
  std::size_t replicas = 10'000;
  std::uint64_t seed = 1;
  double horizon = 10.0;
  std::uint64_t max_events = kDefaultMaxEvents;
  double bin_width = 0.05;
  std::size_t num_bins = 100;
  L1Weighting weighting = L1Weighting::riemann;
  std::filesystem::path output_dir;
  unsigned jobs = 1;
};

/// Directory used when no --out is given: $MSKMC_OUTPUT_DIR, else "mskmc-out".
std::filesystem::path default_output_dir();

std::string to_string(L1Weighting weighting);
L1Weighting parse_weighting(const std::string& text);

/// Model named by the config at `epsilon` (the model file's own epsilon when
/// none is given), with the initial-state override applied.
Preset resolve_model(const RunConfig& config, std::optional<double> epsilon);

/// Header lines for output files. Stripping the leading "# " from each line
/// yields a TOML file that, passed back with --config to the same command,
/// reproduces the run. The output directory and job count are left out, since
/// neither affects file contents.
std::vector<std::string> config_header(const RunConfig& config, const std::string& command);

struct DeriveResult {
  EffectiveDynamics effective;
  std::string report;
};

/// Writes derive.txt and returns the report.
DeriveResult run_derive(const RunConfig& config, std::ostream& log);

struct SimulateResult {
  Trajectory trajectory;
  std::filesystem::path csv;
};

/// Needs exactly one epsilon. Writes trajectory.csv. Propagates EventBudgetExceeded.
SimulateResult run_simulate(const RunConfig& config, std::ostream& log);

struct SweepResult {
  SweepReport report;
  std::filesystem::path csv;
  std::vector<std::filesystem::path> histograms;
};

/// Writes sweep.csv, one hist_<row>.csv per epsilon and a gnuplot script.
SweepResult run_sweep(const RunConfig& config, std::ostream& log);

}  // namespace mskmc
