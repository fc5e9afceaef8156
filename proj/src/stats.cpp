#include "mskmc/stats.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace mskmc {

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1u), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

ExitTimeSample sample_exit_times(const JumpProcess& process, StateIndex initial,
                                 const SampleOptions& options) {
  const std::size_t n = options.replicas;
  std::vector<double> time(n, 0.0);
  std::vector<double> jump(n, 0.0);
  std::vector<char> ok(n, 0);

  visit_process(process, [&](const auto& kernel, auto slow) {
    const double start_value = slow(initial);
    auto left = [&](StateIndex s) { return slow(s) != start_value; };
    parallel_for(n, options.jobs, [&](std::size_t r) {
      RngStream rng(options.seed, options.stream_offset + r);
      try {
        const FirstHit hit = first_hit_time(kernel, initial, left, rng, options.max_events);
        time[r] = hit.time;
        jump[r] = slow(hit.state) - start_value;
        ok[r] = 1;
      } catch (const AbsorbingState&) {
      } catch (const EventBudgetExceeded&) {
      }
    });
  });

  ExitTimeSample sample;
  sample.initial_state = initial;
  sample.replica_count = n;
  sample.values.reserve(n);
  sample.displacement.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (ok[r]) {
      sample.values.push_back(time[r]);
      sample.displacement.push_back(jump[r]);
    } else {
      ++sample.failures;
    }
  }
  return sample;
}

ExitTimeSample sample_exit_times(const MultiscaleModel& model, StateIndex initial,
                                 const SampleOptions& options) {
  ExitTimeSample sample = sample_exit_times(model.process(), initial, options);
  sample.epsilon = model.epsilon();
  sample.model_id = model.family();
  return sample;
}

MomentReport moments(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw TooFewSamples(n);
  const double nd = static_cast<double>(n);

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= nd;

  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  const double variance = m2 / (nd - 1.0);
  m4 /= nd;

  MomentReport out;
  out.n_samples = n;
  out.mean = mean;
  out.variance = variance;
  const double mean_half = 1.96 * std::sqrt(variance / nd);
  out.ci95_mean = {mean - mean_half, mean + mean_half};
  // Var(s^2) ~ (mu4 - sigma^4 (n - 3) / (n - 1)) / n
  const double var_of_var = std::max(0.0, (m4 - variance * variance * (nd - 3.0) / (nd - 1.0)) / nd);
  const double var_half = 1.96 * std::sqrt(var_of_var);
  out.ci95_variance = {variance - var_half, variance + var_half};
  return out;
}

Histogram histogram(std::span<const double> values, double bin_width, std::size_t num_bins) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("histogram: bin width must be positive");
  if (num_bins == 0) throw std::invalid_argument("histogram: need at least one bin");
  Histogram h;
  h.bin_width = bin_width;
  h.num_bins = num_bins;
  h.densities.assign(num_bins, 0.0);
  if (values.empty()) return h;

  std::vector<std::size_t> counts(num_bins, 0);
  std::size_t tail = 0;
  for (double v : values) {
    const double bin = std::floor(v / bin_width);
    if (bin >= 0.0 && bin < static_cast<double>(num_bins)) {
      ++counts[static_cast<std::size_t>(bin)];
    } else {
      ++tail;
    }
  }
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < num_bins; ++i) {
    h.densities[i] = static_cast<double>(counts[i]) / (n * bin_width);
  }
  h.tail_mass = static_cast<double>(tail) / n;
  return h;
}

double l1_error(const Histogram& hist, double rate, L1Weighting weighting) {
  if (!(rate > 0.0)) throw std::invalid_argument("l1_error: rate must be positive");
  const double w = weighting == L1Weighting::riemann ? hist.bin_width
                                                      : 1.0 / static_cast<double>(hist.num_bins);
  double total = 0.0;
  for (std::size_t i = 1; i <= hist.num_bins; ++i) {
    const double x = static_cast<double>(i) * hist.bin_width;
    total += w * std::abs(rate * std::exp(-rate * x) - hist.densities[i - 1]);
  }
  return total;
}

double discrepancy(std::span<const double> values, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("discrepancy: rate must be positive");
  if (values.empty()) return 1.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = sorted[i] > 0.0 ? -std::expm1(-rate * sorted[i]) : 0.0;
    d = std::max(d, static_cast<double>(i + 1) / n - cdf);
    d = std::max(d, cdf - static_cast<double>(i) / n);
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_critical_1pct(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

double ks_two_sample_critical_1pct(std::size_t n, std::size_t m) {
  const double nd = static_cast<double>(n), md = static_cast<double>(m);
  return 1.63 * std::sqrt((nd + md) / (nd * md));
}

JumpAmplitude jump_amplitude(const ExitTimeSample& sample) {
  JumpAmplitude out;
  out.n = sample.displacement.size();
  if (out.n == 0) return out;
  double sum = 0.0, sum_sq = 0.0;
  for (double dz : sample.displacement) {
    if (dz > 0.0) ++out.right;
    if (dz < 0.0) ++out.left;
    sum += dz;
    sum_sq += dz * dz;
  }
  const double n = static_cast<double>(out.n);
  out.p_right = static_cast<double>(out.right) / n;
  out.p_left = static_cast<double>(out.left) / n;
  out.mean = sum / n;
  out.variance = out.n > 1 ? (sum_sq - n * out.mean * out.mean) / (n - 1.0) : 0.0;
  return out;
}

JumpAmplitude jump_amplitude(const MultiscaleModel& ring, StateIndex initial,
                             const SampleOptions& options) {
  if (!std::holds_alternative<RingModel>(ring.kind())) {
    throw std::invalid_argument("jump_amplitude: ring model required");
  }
  return jump_amplitude(sample_exit_times(ring, initial, options));
}

MartingaleReport martingale_residual(const TwoMacroModel& model, StateIndex start, double horizon,
                                     const SampleOptions& options) {
  const DenseKernel kernel(model.generator());
  const Eigen::VectorXd cbar0 = model.coupling_row_sums(0);
  const Eigen::VectorXd cbar1 = model.coupling_row_sums(1);
  const std::size_t n = options.replicas;
  std::vector<double> residual(n, 0.0), qv(n, 0.0);
  std::vector<char> ok(n, 0);

  parallel_for(n, options.jobs, [&](std::size_t r) {
    RngStream rng(options.seed, options.stream_offset + r);
    Trajectory path;
    try {
      path = simulate(kernel, start, horizon, rng, options.max_events);
    } catch (const EventBudgetExceeded&) {
      return;
    }
    double compensator = 0.0;
    double bracket = 0.0;
    path.for_each_segment([&](StateIndex s, double t0, double t1) {
      const int z = model.macro(s);
      const double cbar = (z == 0 ? cbar0 : cbar1)(static_cast<Eigen::Index>(model.micro(s)));
      compensator += cbar * (1.0 - 2.0 * z) * (t1 - t0);
      bracket += cbar * (t1 - t0);
    });
    residual[r] = model.macro(path.final_state()) - model.macro(start) - compensator;
    qv[r] = bracket;
    ok[r] = 1;
  });

  std::vector<double> res_ok, qv_ok;
  MartingaleReport out;
  for (std::size_t r = 0; r < n; ++r) {
    if (ok[r]) {
      res_ok.push_back(residual[r]);
      qv_ok.push_back(qv[r]);
    } else {
      ++out.failures;
    }
  }
  out.residual = moments(res_ok);
  out.quadratic_variation = moments(qv_ok);
  return out;
}

MartingaleReport martingale_residual(const MultiscaleModel& model, StateIndex start,
                                     double horizon, const SampleOptions& options) {
  const auto* two = std::get_if<TwoMacroModel>(&model.kind());
  if (!two) throw std::invalid_argument("martingale_residual: two-macro model required");
  return martingale_residual(*two, start, horizon, options);
}

bool SweepReport::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.failed; });
}

EffectiveDynamics derive_from_state(const MultiscaleModel& model, StateIndex initial) {
  if (const auto* energy = std::get_if<EnergyModel>(&model.kind())) {
    const double total = energy->energy.at(energy->first(initial)) +
                         energy->energy.at(energy->second(initial));
    return derive(model, total);
  }
  return derive(model);
}

SweepReport sweep(const MultiscaleModel& model, StateIndex initial, std::vector<double> epsilons,
                  const SweepOptions& options) {
  if (epsilons.empty()) throw std::invalid_argument("sweep: empty epsilon list");
  for (double e : epsilons) {
    if (!(e > 0.0)) throw std::invalid_argument(fmt::format("sweep: epsilon {} is not positive", e));
  }
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());

  SweepReport report;
  report.model_id = model.family();
  report.initial_state = initial;
  report.seed = options.sampling.seed;
  report.effective = derive_from_state(model, initial);
  report.limit_rate = limit_exit_rate(report.effective, model.slow_observable(initial));

  for (std::size_t r = 0; r < epsilons.size(); ++r) {
    SweepRow row;
    row.epsilon = epsilons[r];
    row.replicas = options.sampling.replicas;
    SampleOptions sampling = options.sampling;
    sampling.stream_offset = options.sampling.stream_offset + r * options.sampling.replicas;
    try {
      const ExitTimeSample sample = sample_exit_times(model.with_epsilon(epsilons[r]), initial, sampling);
      row.failures = sample.failures;
      row.hist = histogram(sample.values, options.bin_width, options.num_bins);
      row.jumps = jump_amplitude(sample);
      row.moments = moments(sample.values);
      if (report.limit_rate > 0.0) {
        row.l1 = l1_error(row.hist, report.limit_rate, options.weighting);
        row.discrepancy = discrepancy(sample.values, report.limit_rate);
      } else {
        row.l1 = row.discrepancy = std::nan("");
      }
      row.failed = row.failure_fraction() > options.max_failure_fraction;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
      if (row.failures == 0) row.failures = row.replicas;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

void write_comments(std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepReport& report,
                     const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "epsilon,n,mean,mean_lo,mean_hi,var,var_lo,var_hi,l1,discrepancy,p_right,p_left,fail_frac\n";
  for (const auto& row : report.rows) {
    const auto& m = row.moments;
    fmt::print(out, "{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
               row.epsilon, m.n_samples, m.mean, m.ci95_mean.lo, m.ci95_mean.hi, m.variance,
               m.ci95_variance.lo, m.ci95_variance.hi, row.l1, row.discrepancy, row.jumps.p_right,
               row.jumps.p_left, row.failure_fraction());
  }
}

void write_histogram_csv(std::ostream& out, const Histogram& hist,
                         const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "bin_lo,bin_hi,density\n";
  for (std::size_t i = 0; i < hist.num_bins; ++i) {
    fmt::print(out, "{:.17g},{:.17g},{:.17g}\n", static_cast<double>(i) * hist.bin_width,
               static_cast<double>(i + 1) * hist.bin_width, hist.densities[i]);
  }
}

}  // namespace mskmc
