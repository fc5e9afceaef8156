#include "mskmc/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mskmc/model_file.hpp"

namespace mskmc {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::filesystem::path output_dir(const RunConfig& config) {
  return config.output_dir.empty() ? default_output_dir() : config.output_dir;
}

template <class T>
std::string toml_list(const std::vector<T>& values) {
  std::string s = "[";
  for (std::size_t i = 0; i < values.size(); ++i) s += fmt::format("{}{}", i ? ", " : "", values[i]);
  return s + "]";
}

std::string quoted(const std::string& s) { return fmt::format("\"{}\"", s); }

std::vector<std::string> limit_comments(const EffectiveDynamics& effective) {
  std::vector<std::string> lines;
  if (const auto* two = std::get_if<TwoMacroRates>(&effective)) {
    lines.push_back(fmt::format("# lambda0 = {:.17g}", two->lambda0));
    lines.push_back(fmt::format("# lambda1 = {:.17g}", two->lambda1));
  } else if (const auto* ring = std::get_if<RingRates>(&effective)) {
    lines.push_back(fmt::format("# lambda_l = {:.17g}", ring->lambda_l));
    lines.push_back(fmt::format("# lambda_r = {:.17g}", ring->lambda_r));
  } else {
    const auto& energy = std::get<EnergyRates>(effective);
    lines.push_back(fmt::format("# total_energy = {:.17g}", energy.total_energy));
    for (Eigen::Index a = 0; a < energy.rates.rows(); ++a) {
      for (Eigen::Index b = 0; b < energy.rates.cols(); ++b) {
        if (a != b) {
          lines.push_back(fmt::format("# B({},{}) = {:.17g}", energy.levels[static_cast<std::size_t>(a)],
                                      energy.levels[static_cast<std::size_t>(b)], energy.rates(a, b)));
        }
      }
    }
  }
  return lines;
}

std::optional<double> single_epsilon(const RunConfig& config) {
  if (config.epsilons.empty()) return std::nullopt;
  return config.epsilons.front();
}

}  // namespace

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("MSKMC_OUTPUT_DIR"); env && *env) return env;
  return "mskmc-out";
}

std::string to_string(L1Weighting weighting) {
  return weighting == L1Weighting::riemann ? "riemann" : "paper_literal";
}

L1Weighting parse_weighting(const std::string& text) {
  if (text == "riemann") return L1Weighting::riemann;
  if (text == "paper_literal") return L1Weighting::paper_literal;
  throw std::invalid_argument("unknown l1 weighting '" + text + "'");
}

Preset resolve_model(const RunConfig& config, std::optional<double> epsilon) {
  Preset preset = [&] {
    if (!config.preset.empty()) return make_preset(config.preset, config.params, epsilon.value_or(1.0));
    if (config.model_file.empty()) throw std::invalid_argument("either a preset or a model file is required");
    Preset p = load_model_file(config.model_file);
    if (epsilon) p.model = p.model.with_epsilon(*epsilon);
    return p;
  }();

  if (!config.initial.empty()) {
    if (config.initial.size() != 2) throw std::invalid_argument("initial state must be a pair x z");
    const std::int64_t x = config.initial[0];
    const std::int64_t z = config.initial[1];
    if (x < 0) throw std::invalid_argument("initial micro-state must be >= 0");
    const auto ux = static_cast<std::size_t>(x);
    const auto& kind = preset.model.kind();
    if (const auto* two = std::get_if<TwoMacroModel>(&kind)) {
      if (ux >= two->m || (z != 0 && z != 1)) throw std::invalid_argument("initial state out of range");
      preset.initial_state = two->index(ux, static_cast<int>(z));
    } else if (const auto* ring = std::get_if<RingModel>(&kind)) {
      if (ux >= ring->m) throw std::invalid_argument("initial state out of range");
      preset.initial_state = ring->index(ux, z);
    } else {
      const auto& energy = std::get<EnergyModel>(kind);
      if (ux >= energy.words() || z < 0 || static_cast<std::size_t>(z) >= energy.words()) {
        throw std::invalid_argument("initial state out of range");
      }
      preset.initial_state = energy.index(ux, static_cast<std::size_t>(z));
    }
  }
  return preset;
}

std::vector<std::string> config_header(const RunConfig& config, const std::string& command) {
  std::vector<std::string> lines;
  lines.push_back(fmt::format("# mskmc {}", command));
  if (!config.preset.empty()) lines.push_back("preset = " + quoted(config.preset));
  if (!config.model_file.empty()) lines.push_back("model-file = " + quoted(config.model_file));
  lines.push_back(fmt::format("m = {}", config.params.m));
  lines.push_back(fmt::format("q = {}", config.params.q));
  lines.push_back(fmt::format("c = {}", config.params.c));
  lines.push_back(fmt::format("c-l = {}", config.params.c_l));
  lines.push_back(fmt::format("c-r = {}", config.params.c_r));
  lines.push_back(fmt::format("q1 = {}", config.params.energy.q1));
  lines.push_back(fmt::format("q2 = {}", config.params.energy.q2));
  lines.push_back(fmt::format("c1 = {}", config.params.energy.c1));
  lines.push_back(fmt::format("c2 = {}", config.params.energy.c2));
  if (!config.epsilons.empty()) lines.push_back("epsilon = " + toml_list(config.epsilons));
  if (!config.initial.empty()) lines.push_back("initial = " + toml_list(config.initial));
  if (config.total_energy) lines.push_back(fmt::format("total-energy = {}", *config.total_energy));
  lines.push_back(fmt::format("replicas = {}", config.replicas));
  lines.push_back(fmt::format("seed = {}", config.seed));
  lines.push_back(fmt::format("horizon = {}", config.horizon));
  lines.push_back(fmt::format("max-events = {}", config.max_events));
  lines.push_back(fmt::format("bin-width = {}", config.bin_width));
  lines.push_back(fmt::format("num-bins = {}", config.num_bins));
  lines.push_back("l1-weighting = " + quoted(to_string(config.weighting)));
  return lines;
}

DeriveResult run_derive(const RunConfig& config, std::ostream& log) {
  const Preset preset = resolve_model(config, single_epsilon(config));
  DeriveResult result;
  if (std::holds_alternative<EnergyModel>(preset.model.kind()) && config.total_energy) {
    result.effective = derive(preset.model, config.total_energy);
  } else {
    result.effective = derive_from_state(preset.model, preset.initial_state);
  }
  result.report = format_report(result.effective);

  auto out = open_output(output_dir(config) / "derive.txt");
  for (const auto& line : config_header(config, "derive")) out << "# " << line << '\n';
  out << result.report;
  log << result.report;
  return result;
}

SimulateResult run_simulate(const RunConfig& config, std::ostream& log) {
  if (config.epsilons.size() > 1) throw std::invalid_argument("simulate takes a single epsilon");
  if (config.preset.size() && config.epsilons.empty()) {
    throw std::invalid_argument("simulate needs --epsilon with a preset");
  }
  const Preset preset = resolve_model(config, single_epsilon(config));
  const JumpProcess process = preset.model.process();

  const auto started = std::chrono::steady_clock::now();
  RngStream rng(config.seed, 0);
  SimulateResult result;
  result.trajectory = visit_process(process, [&](const auto& kernel, auto) {
    return simulate(kernel, preset.initial_state, config.horizon, rng, config.max_events);
  });
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  result.csv = output_dir(config) / "trajectory.csv";
  auto out = open_output(result.csv);
  for (const auto& line : config_header(config, "simulate")) out << "# " << line << '\n';
  write_trajectory_csv(out, result.trajectory,
                       [&](StateIndex s) { return preset.model.label(s); });

  const auto& path = result.trajectory;
  fmt::print(log, "events={} final_state={} absorbed={} wall_time={:.3f}s\n", path.events.size(),
             preset.model.label(path.final_state()), path.absorbed ? "yes" : "no", seconds);
  return result;
}

SweepResult run_sweep(const RunConfig& config, std::ostream& log) {
  if (config.epsilons.empty()) throw std::invalid_argument("sweep needs at least one epsilon");
  for (double e : config.epsilons) {
    if (!(e > 0.0)) throw std::invalid_argument(fmt::format("epsilon {} is not positive", e));
  }
  if (config.replicas < 2) throw std::invalid_argument("sweep needs at least 2 replicas");
  const Preset preset = resolve_model(config, config.epsilons.front());

  SweepOptions options;
  options.sampling.replicas = config.replicas;
  options.sampling.seed = config.seed;
  options.sampling.max_events = config.max_events;
  options.sampling.jobs = config.jobs;
  options.bin_width = config.bin_width;
  options.num_bins = config.num_bins;
  options.weighting = config.weighting;

  SweepResult result;
  result.report = sweep(preset.model, preset.initial_state, config.epsilons, options);
  const auto& report = result.report;

  std::vector<std::string> comments = config_header(config, "sweep");
  comments.push_back(fmt::format("# model = {} ({})", preset.name, report.model_id));
  comments.push_back(fmt::format("# initial_state = {}", preset.model.label(preset.initial_state)));
  comments.push_back(fmt::format("# limit_rate = {:.17g}", report.limit_rate));
  for (auto& line : limit_comments(report.effective)) comments.push_back(std::move(line));

  const auto dir = output_dir(config);
  result.csv = dir / "sweep.csv";
  {
    auto out = open_output(result.csv);
    write_sweep_csv(out, report, comments);
  }
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    auto hist_comments = comments;
    hist_comments.push_back(fmt::format("# epsilon = {:.17g}", report.rows[r].epsilon));
    const auto path = dir / fmt::format("hist_{}.csv", r);
    auto out = open_output(path);
    write_histogram_csv(out, report.rows[r].hist, hist_comments);
    result.histograms.push_back(path);
  }
  {
    auto out = open_output(dir / "plot_sweep.gp");
    fmt::print(out,
               "# gnuplot script for sweep.csv and hist_<row>.csv\n"
               "set datafile separator ','\n"
               "set datafile commentschars '#'\n"
               "set key autotitle columnhead\n"
               "limit = {:.17g}\n"
               "set logscale x\n"
               "set multiplot layout 2,2\n"
               "plot 'sweep.csv' using 1:3:4:5 with yerrorbars title 'mean', 1/limit title 'limit'\n"
               "plot 'sweep.csv' using 1:6:7:8 with yerrorbars title 'variance', 1/limit**2 title 'limit'\n"
               "plot 'sweep.csv' using 1:9 with linespoints title 'L1 error'\n"
               "plot 'sweep.csv' using 1:10 with linespoints title 'discrepancy'\n"
               "unset multiplot\n"
               "pause -1\n"
               "unset logscale x\n"
               "plot 'hist_0.csv' using (($1+$2)/2):3 with boxes title 'density', limit*exp(-limit*x) title 'limit'\n"
               "pause -1\n",
               report.limit_rate);
  }

  fmt::print(log, "{} from {}  limit rate {:.6g}  seed {}\n", preset.name,
             preset.model.label(preset.initial_state), report.limit_rate, config.seed);
  fmt::print(log, "{:>10} {:>7} {:>10} {:>10} {:>9} {:>9} {:>8} {:>7}\n", "epsilon", "n", "mean",
             "var", "l1", "disc", "p_right", "fail");
  for (const auto& row : report.rows) {
    fmt::print(log, "{:>10.3g} {:>7} {:>10.5g} {:>10.5g} {:>9.4g} {:>9.4g} {:>8.4g} {:>7.3g}{}\n",
               row.epsilon, row.moments.n_samples, row.moments.mean, row.moments.variance, row.l1,
               row.discrepancy, row.jumps.p_right, row.failure_fraction(),
               row.failed ? "  FAILED " + row.error : "");
  }
  return result;
}

}  // namespace mskmc
