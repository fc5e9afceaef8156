#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mskmc/effective.hpp"
#include "mskmc/models.hpp"
#include "mskmc/simulate.hpp"

namespace mskmc {

struct SampleOptions {
  std::size_t replicas = 10'000;
  std::uint64_t seed = 1;
  /// Replica r draws from stream stream_offset + r.
  std::uint64_t stream_offset = 0;
  std::uint64_t max_events = kDefaultMaxEvents;
  /// Worker threads; results never depend on this.
  unsigned jobs = 1;
};

/// Runs body(r) for r in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);

/// I.i.d. first exit times of the slow observable from its initial value.
struct ExitTimeSample {
  std::vector<double> values;
  /// slow(exit state) - slow(initial state), aligned with `values`.
  std::vector<double> displacement;
  double epsilon = 0.0;
  std::string model_id;
  StateIndex initial_state = 0;
  std::size_t replica_count = 0;
  /// Replicas that hit the event budget or an absorbing state; excluded from `values`.
  std::size_t failures = 0;

  double failure_fraction() const {
    return replica_count ? static_cast<double>(failures) / static_cast<double>(replica_count) : 0.0;
  }
};

ExitTimeSample sample_exit_times(const JumpProcess& process, StateIndex initial,
                                 const SampleOptions& options);

/// Same, filling epsilon and model id from the model.
ExitTimeSample sample_exit_times(const MultiscaleModel& model, StateIndex initial,
                                 const SampleOptions& options);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return lo <= v && v <= hi; }
};

struct MomentReport {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  Interval ci95_mean;
  Interval ci95_variance;
  std::size_t n_samples = 0;

  double std_error() const { return std::sqrt(variance / static_cast<double>(n_samples)); }
};

/// Mean with a normal-approximation 95% interval, unbiased variance with a
/// delta-method interval built from the empirical fourth central moment.
/// Throws TooFewSamples below two values.
MomentReport moments(std::span<const double> values);

struct Histogram {
  double bin_width = 0.05;
  std::size_t num_bins = 100;
  /// Bin i covers [i * bin_width, (i + 1) * bin_width).
  std::vector<double> densities;
  /// Fraction of samples at or beyond num_bins * bin_width.
  double tail_mass = 0.0;
};

Histogram histogram(std::span<const double> values, double bin_width = 0.05,
                    std::size_t num_bins = 100);

enum class L1Weighting {
  riemann,        // each term weighted by the bin width
  paper_literal,  // each term weighted by 1 / num_bins
};

/// sum_{i=1..n} w * |f(i dx) - densities[i - 1]| with f(x) = rate * exp(-rate x):
/// the reference density at the right end of each bin.
double l1_error(const Histogram& hist, double rate, L1Weighting weighting = L1Weighting::riemann);

/// Kolmogorov-Smirnov distance between the empirical CDF and Exp(rate).
double discrepancy(std::span<const double> values, double rate);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic 1% critical values, c = 1.63.
double ks_critical_1pct(std::size_t n);
double ks_two_sample_critical_1pct(std::size_t n, std::size_t m);

/// Law of the slow-observable jump at the first exit.
struct JumpAmplitude {
  std::size_t n = 0;
  std::size_t right = 0;
  std::size_t left = 0;
  double p_right = 0.0;
  double p_left = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

JumpAmplitude jump_amplitude(const ExitTimeSample& sample);

/// Runs the exit sampling on a ring model and returns the macro jump law.
JumpAmplitude jump_amplitude(const MultiscaleModel& ring, StateIndex initial,
                             const SampleOptions& options);

/// Moments across replicas of the compensated macro indicator
///   M_T = Z_T - Z_0 - int_0^T Cbar_{Z_s}(X_s) (1 - 2 Z_s) ds
/// and of its predictable quadratic variation int_0^T Cbar_{Z_s}(X_s) ds,
/// both integrated exactly along each piecewise-constant path.
struct MartingaleReport {
  MomentReport residual;
  MomentReport quadratic_variation;
  std::size_t failures = 0;
};

MartingaleReport martingale_residual(const TwoMacroModel& model, StateIndex start, double horizon,
                                     const SampleOptions& options);
MartingaleReport martingale_residual(const MultiscaleModel& model, StateIndex start,
                                     double horizon, const SampleOptions& options);

struct SweepOptions {
  SampleOptions sampling;
  double bin_width = 0.05;
  std::size_t num_bins = 100;
  L1Weighting weighting = L1Weighting::riemann;
  /// Rows whose failed-replica fraction exceeds this are marked failed.
  double max_failure_fraction = 0.01;
};

struct SweepRow {
  double epsilon = 0.0;
  std::size_t replicas = 0;
  std::size_t failures = 0;
  MomentReport moments;
  Histogram hist;
  double l1 = 0.0;
  double discrepancy = 0.0;
  JumpAmplitude jumps;
  bool failed = false;
  std::string error;

  double failure_fraction() const {
    return replicas ? static_cast<double>(failures) / static_cast<double>(replicas) : 0.0;
  }
};

struct SweepReport {
  std::string model_id;
  StateIndex initial_state = 0;
  std::uint64_t seed = 0;
  EffectiveDynamics effective;
  double limit_rate = 0.0;
  /// Sorted by decreasing epsilon.
  std::vector<SweepRow> rows;

  bool any_failed() const;
};

/// The effective dynamics seen from `initial`; for the energy model the total
/// energy is read off the initial pair state.
EffectiveDynamics derive_from_state(const MultiscaleModel& model, StateIndex initial);

/// For each epsilon (processed in decreasing order), samples exit times and
/// compares them with the analytic limit law. Row r uses streams
/// [r * replicas, (r + 1) * replicas). Per-row failures are recorded, not thrown.
SweepReport sweep(const MultiscaleModel& model, StateIndex initial, std::vector<double> epsilons,
                  const SweepOptions& options);

/// `comments` are written first, one "# " line each.
void write_sweep_csv(std::ostream& out, const SweepReport& report,
                     const std::vector<std::string>& comments);
void write_histogram_csv(std::ostream& out, const Histogram& hist,
                         const std::vector<std::string>& comments);

}  // namespace mskmc
