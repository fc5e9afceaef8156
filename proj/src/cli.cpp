#include "mskmc/cli.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mskmc/errors.hpp"
#include "mskmc/runner.hpp"
#include "mskmc/validation.hpp"

namespace mskmc::cli {
namespace {

struct Options {
  RunConfig config;
  std::string config_file;
  std::string weighting = "riemann";
  std::string out;
};

void add_run_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--config", o.config_file, "TOML run config; flags given on the command line win")
      ->check(CLI::ExistingFile);
  auto& c = o.config;
  auto* preset = cmd.add_option("--preset", c.preset, "bundled model")
                     ->check(CLI::IsMember(preset_names()));
  cmd.add_option("--model-file", c.model_file, "YAML model definition")->excludes(preset);
  cmd.add_option("--m", c.params.m, "micro-states per macro-state (two-macro, ring)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  cmd.add_option("--q", c.params.q, "internal nearest-neighbour rate")->check(CLI::PositiveNumber);
  cmd.add_option("--c", c.params.c, "two-macro coupling rate")->check(CLI::NonNegativeNumber);
  cmd.add_option("--c-l", c.params.c_l, "ring left coupling rate")->check(CLI::NonNegativeNumber);
  cmd.add_option("--c-r", c.params.c_r, "ring right coupling rate")->check(CLI::NonNegativeNumber);
  cmd.add_option("--q1", c.params.energy.q1, "energy preset rate ud -> du")->check(CLI::NonNegativeNumber);
  cmd.add_option("--q2", c.params.energy.q2, "energy preset rate du -> ud")->check(CLI::NonNegativeNumber);
  cmd.add_option("--c1", c.params.energy.c1, "energy exchange rate out of ud pairs")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--c2", c.params.energy.c2, "energy exchange rate otherwise")->check(CLI::NonNegativeNumber);
  cmd.add_option("--epsilon", c.epsilons, "time-scale ratio(s)")->delimiter(',')->check(CLI::PositiveNumber);
  cmd.add_option("--initial", c.initial, "initial state x z")->expected(2);
  cmd.add_option("--total-energy", c.total_energy, "energy level for derive (energy model)");
  cmd.add_option("--replicas", c.replicas, "replicas per epsilon")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", c.seed, "master seed");
  cmd.add_option("--horizon", c.horizon, "simulation horizon")->check(CLI::NonNegativeNumber);
  cmd.add_option("--max-events", c.max_events, "event budget per path")->check(CLI::PositiveNumber);
  cmd.add_option("--bin-width", c.bin_width, "histogram bin width")->check(CLI::PositiveNumber);
  cmd.add_option("--num-bins", c.num_bins, "histogram bin count")->check(CLI::PositiveNumber);
  cmd.add_option("--l1-weighting", o.weighting, "riemann or paper_literal")
      ->check(CLI::IsMember({"riemann", "paper_literal"}));
  cmd.add_option("--out", o.out, "output directory (default $MSKMC_OUTPUT_DIR or mskmc-out)");
  cmd.add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
}

/// Fills every option not given on the command line from the TOML file.
void apply_config_file(CLI::App& cmd, const std::string& path) {
  for (const auto& item : CLI::ConfigTOML().from_file(path)) {
    if (!item.parents.empty() || item.name == "++" || item.name == "--") {
      throw CLI::ConversionError(path + ": tables are not supported (key " + item.fullname() + ")");
    }
    CLI::Option* opt = cmd.get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config") {
      throw CLI::ConversionError(path + ": unknown key '" + item.name + "'");
    }
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

RunConfig finish(CLI::App& cmd, Options& o) {
  if (!o.config_file.empty()) apply_config_file(cmd, o.config_file);
  o.config.weighting = parse_weighting(o.weighting);
  o.config.output_dir = o.out.empty() ? default_output_dir() : std::filesystem::path(o.out);
  return o.config;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiscale kinetic Monte Carlo: effective dynamics, simulation and validation", "mskmc"};
  app.require_subcommand(1);

  Options derive_opts, simulate_opts, sweep_opts;
  auto* derive = app.add_subcommand("derive", "print invariant measures and effective rates");
  add_run_options(*derive, derive_opts);
  auto* simulate = app.add_subcommand("simulate", "write one trajectory");
  add_run_options(*simulate, simulate_opts);
  auto* sweep = app.add_subcommand("sweep", "exit-time statistics over a list of epsilons");
  add_run_options(*sweep, sweep_opts);

  ValidationOptions validate_opts;
  std::string validate_out;
  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  validate->add_option("--out", validate_out, "directory for validation.json and scratch files");
  validate->add_option("--jobs", validate_opts.jobs, "worker threads")->check(CLI::PositiveNumber);
  validate->add_option("--only", validate_opts.only, "criterion ids to run")->delimiter(',')->check(CLI::Range(1, 11));
  validate->add_flag("--inject-negative-rate", validate_opts.inject_negative_rate,
                     "self-test: corrupt the two-macro preset");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kConfigError;
  }

  try {
    if (derive->parsed()) {
      run_derive(finish(*derive, derive_opts), out);
    } else if (simulate->parsed()) {
      run_simulate(finish(*simulate, simulate_opts), out);
    } else if (sweep->parsed()) {
      const auto result = run_sweep(finish(*sweep, sweep_opts), out);
      fmt::print(out, "wrote {}\n", result.csv.string());
      if (result.report.any_failed()) {
        fmt::print(err, "error: failure fraction above 1% in at least one row\n");
        return kTooManyFailures;
      }
    } else {
      const std::filesystem::path dir = validate_out.empty() ? default_output_dir() : std::filesystem::path(validate_out);
      validate_opts.work_dir = dir / "validate-scratch";
      const auto results = run_validation(validate_opts, out);
      std::filesystem::create_directories(dir);
      std::ofstream(dir / "validation.json", std::ios::binary) << validation_json(results);
      int failed = 0;
      for (const auto& r : results) {
        if (!r.passed) {
          fmt::print(err, "criterion {} failed: {}\n", r.id, r.name);
          ++failed;
        }
      }
      fmt::print(out, "{}/{} criteria passed\n", results.size() - failed, results.size());
      return failed ? kValidationFailed : kOk;
    }
  } catch (const CLI::Error& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const EventBudgetExceeded& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kEventBudget;
  } catch (const ModelError& e) {
    fmt::print(err, "model error: {}\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kConfigError;
  }
  return kOk;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args, std::cout, std::cerr);
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 1;
  }
}

}  // namespace mskmc::cli
