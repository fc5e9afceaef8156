#include "mskmc/validation.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "mskmc/effective.hpp"
#include "mskmc/models.hpp"
#include "mskmc/runner.hpp"
#include "mskmc/stationary.hpp"
#include "mskmc/stats.hpp"

namespace mskmc {
namespace {

constexpr std::size_t kReplicas = 10'000;

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool condition, std::string note) {
    ok = ok && condition;
    notes.push_back((condition ? "" : "FAILED ") + std::move(note));
  }

  CriterionResult result(int id, std::string name) const {
    std::string detail;
    for (std::size_t i = 0; i < notes.size(); ++i) detail += (i ? "; " : "") + notes[i];
    return {id, std::move(name), ok, std::move(detail)};
  }
};

SampleOptions sampling(std::uint64_t seed, unsigned jobs, std::uint64_t offset = 0) {
  SampleOptions o;
  o.replicas = kReplicas;
  o.seed = seed;
  o.stream_offset = offset;
  o.jobs = jobs;
  return o;
}

Preset two_macro_preset(std::size_t m, double epsilon, bool corrupt) {
  if (corrupt) {
    Eigen::MatrixXd q = tridiagonal(static_cast<Eigen::Index>(m), 1.0).rates();
    q(0, 1) = -1.0;
    const IntensityMatrix wells(q, "Q0");  // throws NegativeRate
    return {"two-macro-s2.3", build_two_macro(m, wells, wells, Eigen::MatrixXd::Zero(m, m),
                                              Eigen::MatrixXd::Zero(m, m), epsilon), 0};
  }
  PresetParams params;
  params.m = m;
  return make_preset("two-macro-s2.3", params, epsilon);
}

// 1
CriterionResult effective_rates(const ValidationOptions& options) {
  Check check;
  try {
    for (std::size_t m : {3u, 5u, 7u, 20u}) {
      const Preset p = two_macro_preset(m, 1.0, options.inject_negative_rate);
      const auto rates = derive_two_macro(std::get<TwoMacroModel>(p.model.kind()));
      const double expected = 2.0 / static_cast<double>(m);
      const double err = std::max(std::abs(rates.lambda0 - expected), std::abs(rates.lambda1 - expected));
      check.expect(err <= 1e-12, fmt::format("two-macro m={} lambda={:.17g} err={:.3g}", m, rates.lambda0, err));
    }
    const Preset ring = make_preset("ring-s3.2", {}, 1.0);
    const auto r = derive_ring(std::get<RingModel>(ring.model.kind()));
    const double ring_err = std::max(std::abs(r.lambda_l - 0.2), std::abs(r.lambda_r - 0.4));
    check.expect(ring_err <= 1e-12, fmt::format("ring lambda_l={:.17g} lambda_r={:.17g} err={:.3g}",
                                                r.lambda_l, r.lambda_r, ring_err));
    const Preset energy = make_preset("energy-s4.3", {}, 1.0);
    const auto e = derive_energy(std::get<EnergyModel>(energy.model.kind()), 1.0);
    const double b10 = e.rates(1, 0);
    check.expect(std::abs(b10 - 6.0 / 11.0) <= 1e-12,
                 fmt::format("energy B(1,0)={:.17g} err={:.3g}", b10, std::abs(b10 - 6.0 / 11.0)));
  } catch (const ModelError& err) {
    check.expect(false, fmt::format("construction failed: {}", err.what()));
  }
  return check.result(1, "effective-rate exactness");
}

// 2
CriterionResult exit_time_moments(const ValidationOptions& options) {
  Check check;
  const Preset p = make_preset("two-macro-s2.3", {}, 1e-3);
  const auto sample = sample_exit_times(p.model, p.initial_state, sampling(2002, options.jobs));
  const auto mom = moments(sample.values);
  check.expect(sample.failures == 0, fmt::format("failures={}", sample.failures));
  check.expect(std::abs(mom.mean - 2.5) < 4.0 * mom.std_error(),
               fmt::format("mean={:.5f} |mean-2.5|={:.4f} 4SE={:.4f}", mom.mean,
                           std::abs(mom.mean - 2.5), 4.0 * mom.std_error()));
  check.expect(mom.ci95_variance.contains(6.25),
               fmt::format("var={:.4f} ci95=[{:.4f}, {:.4f}] target 6.25", mom.variance,
                           mom.ci95_variance.lo, mom.ci95_variance.hi));
  return check.result(2, "exit-time moment convergence (two-macro, eps=1e-3)");
}

// 3
CriterionResult l1_decay(const ValidationOptions& options) {
  Check check;
  const Preset p = make_preset("two-macro-s2.3", {}, 1.0);
  SweepOptions sweep_options;
  sweep_options.sampling = sampling(3003, options.jobs);
  const auto report = sweep(p.model, p.initial_state, {1.0, 1e-1, 1e-2, 1e-3}, sweep_options);
  std::string series;
  for (const auto& row : report.rows) {
    series += fmt::format(" eps={:g}:{:.4f}", row.epsilon, row.l1);
    check.expect(!row.failed, fmt::format("eps={:g} ok", row.epsilon));
  }
  const double coarse = report.rows.front().l1;
  const double fine = report.rows.back().l1;
  check.expect(fine < coarse, fmt::format("l1{} ; l1(1e-3) < l1(1)", series));
  check.expect(fine < 3.0 * kL1NoiseFloor,
               fmt::format("l1(1e-3)={:.4f} < 3 x floor={:.4f}", fine, 3.0 * kL1NoiseFloor));
  return check.result(3, "L1-error decay (two-macro)");
}

// 4
CriterionResult ring_limit(const ValidationOptions& options) {
  Check check;
  const Preset p = make_preset("ring-s3.2", {}, 1e-3);
  const auto sample = sample_exit_times(p.model, p.initial_state, sampling(4004, options.jobs));
  const auto mom = moments(sample.values);
  const auto jumps = jump_amplitude(sample);
  const double n = static_cast<double>(jumps.n);
  check.expect(sample.failures == 0, fmt::format("failures={}", sample.failures));
  check.expect(std::abs(mom.mean - 5.0 / 3.0) < 4.0 * mom.std_error(),
               fmt::format("mean={:.5f} target 5/3, 4SE={:.4f}", mom.mean, 4.0 * mom.std_error()));
  const double p_se = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / n);
  check.expect(std::abs(jumps.p_right - 2.0 / 3.0) < 4.0 * p_se,
               fmt::format("P(dZ=+1)={:.5f} target 2/3, 4SE={:.4f}", jumps.p_right, 4.0 * p_se));
  const double dz_se = std::sqrt(jumps.variance / n);
  check.expect(std::abs(jumps.mean - 1.0 / 3.0) < 4.0 * dz_se,
               fmt::format("E[dZ]={:.5f} target 1/3, 4SE={:.4f}", jumps.mean, 4.0 * dz_se));
  return check.result(4, "ring model limit law (eps=1e-3)");
}

// 5
CriterionResult energy_limit(const ValidationOptions& options) {
  Check check;
  const Preset p = make_preset("energy-s4.3", {}, 1e-3);
  const auto sample = sample_exit_times(p.model, p.initial_state, sampling(5005, options.jobs));
  const auto mom = moments(sample.values);
  check.expect(sample.failures == 0, fmt::format("failures={}", sample.failures));
  check.expect(std::abs(mom.mean - 11.0 / 6.0) < 4.0 * mom.std_error(),
               fmt::format("mean={:.5f} target 11/6, 4SE={:.4f}", mom.mean, 4.0 * mom.std_error()));
  const double d = discrepancy(sample.values, 6.0 / 11.0);
  const double crit = ks_critical_1pct(sample.values.size());
  check.expect(d < crit, fmt::format("discrepancy={:.5f} < {:.5f}", d, crit));
  return check.result(5, "energy model limit law (E=1, eps=1e-3)");
}

// 6
CriterionResult noise_floor(const ValidationOptions& options) {
  Check check;
  struct Case {
    std::string name;
    Preset preset;
  };
  std::vector<Case> cases;
  cases.push_back({"two-macro", make_preset("two-macro-s2.3", {}, 1.0)});
  cases.push_back({"ring", make_preset("ring-s3.2", {}, 1.0)});
  cases.push_back({"energy", make_preset("energy-s4.3", {}, 1.0)});
  std::uint64_t seed = 6006;
  for (const auto& c : cases) {
    const auto eff = derive_from_state(c.preset.model, c.preset.initial_state);
    const double slow = c.preset.model.slow_observable(c.preset.initial_state);
    const double rate = limit_exit_rate(eff, slow);
    const LimitProcess limit = limit_process(eff);
    const auto sample = sample_exit_times(limit.process, limit_state(eff, slow), sampling(seed++, options.jobs));
    const double d = discrepancy(sample.values, rate);
    const double l1 = l1_error(histogram(sample.values), rate);
    const double crit = ks_critical_1pct(sample.values.size());
    check.expect(d < crit, fmt::format("{} rate={:.5f} discrepancy={:.5f} < {:.5f}", c.name, rate, d, crit));
    check.expect(l1 < kL1NoiseFloor, fmt::format("{} l1={:.4f} < floor {:.2f}", c.name, l1, kL1NoiseFloor));
  }
  return check.result(6, "harness noise floor (limit chains)");
}

// 7
CriterionResult martingale(const ValidationOptions& options) {
  Check check;
  const Preset p = make_preset("two-macro-s2.3", {}, 0.1);
  const auto report = martingale_residual(p.model, p.initial_state, 5.0, sampling(7007, options.jobs));
  const auto& res = report.residual;
  const double std_dev = std::sqrt(res.variance);
  const double bound = 4.0 * std_dev / std::sqrt(static_cast<double>(res.n_samples));
  check.expect(std::abs(res.mean) < bound, fmt::format("mean M={:.5f} bound {:.5f}", res.mean, bound));
  const double qv = report.quadratic_variation.mean;
  const double rel = std::abs(res.variance - qv) / qv;
  check.expect(rel <= 0.15, fmt::format("var M={:.4f} mean int Cbar={:.4f} rel diff={:.4f} <= 0.15",
                                        res.variance, qv, rel));
  return check.result(7, "martingale residual (two-macro, eps=0.1, T=5)");
}

// 8
CriterionResult homogeneous_coupling(const ValidationOptions& options) {
  Check check;
  constexpr std::size_t m = 5;
  const IntensityMatrix wells = tridiagonal(m, 1.0);
  // Every micro-state couples to its mirror at the same total rate.
  const Eigen::MatrixXd coupling = 0.5 * Eigen::MatrixXd::Identity(m, m);
  const auto model = build_two_macro(m, wells, wells, coupling, coupling, 1.0);
  const auto coarse = sample_exit_times(model, 0, sampling(8008, options.jobs, 0));
  const auto fine = sample_exit_times(model.with_epsilon(1e-2), 0, sampling(8008, options.jobs, kReplicas));
  const double d = ks_two_sample(coarse.values, fine.values);
  const double crit = ks_two_sample_critical_1pct(coarse.values.size(), fine.values.size());
  check.expect(d < crit, fmt::format("two-sample KS={:.5f} < {:.5f}", d, crit));
  return check.result(8, "homogeneous-coupling decoupling");
}

// 9
CriterionResult conservation(const ValidationOptions& options) {
  Check check;
  const Preset p = make_preset("energy-s4.3", {}, 1e-2);
  const auto& model = std::get<EnergyModel>(p.model.kind());
  const DenseKernel kernel(p.model.generator());
  auto total = [&](StateIndex s) { return model.energy[model.first(s)] + model.energy[model.second(s)]; };
  const double e0 = total(p.initial_state);
  std::size_t jumps = 0, exchanges = 0, violations = 0, non_coupling_exchanges = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    RngStream rng(9009, r);
    const Trajectory path = simulate(kernel, p.initial_state, 50.0, rng);
    StateIndex prev = path.initial_state;
    for (const auto& e : path.events) {
      ++jumps;
      if (total(e.state) != e0) ++violations;
      if (model.energy[model.first(e.state)] != model.energy[model.first(prev)]) {
        ++exchanges;
        if (!(model.c(static_cast<Eigen::Index>(prev), static_cast<Eigen::Index>(e.state)) > 0.0)) {
          ++non_coupling_exchanges;
        }
      }
      prev = e.state;
    }
  }
  (void)options;
  check.expect(violations == 0, fmt::format("{} jumps, {} total-energy violations", jumps, violations));
  check.expect(non_coupling_exchanges == 0,
               fmt::format("{} first-particle energy changes, {} not driven by C", exchanges,
                           non_coupling_exchanges));
  return check.result(9, "energy conservation along trajectories");
}

Eigen::VectorXd nullspace_oracle(const IntensityMatrix& q) {
  // Left null vector of Q - Delta from the SVD, independent of the LU route.
  const Eigen::MatrixXd gt = q.generator().transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gt, Eigen::ComputeFullV);
  Eigen::VectorXd v = svd.matrixV().col(gt.cols() - 1);
  return v / v.sum();
}

// 10
CriterionResult stationary_oracle(const ValidationOptions&) {
  Check check;
  RngStream rng(10010, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto dim = static_cast<Eigen::Index>(2 + rng.next_u64() % 5);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        if (i != j && rng.uniform_open() < 0.5) a(i, j) = 0.1 + 4.9 * rng.uniform_open();
      }
      a(i, (i + 1) % dim) = 0.1 + 4.9 * rng.uniform_open();  // a cycle keeps it irreducible
    }
    const IntensityMatrix q(a);
    const auto pi = invariant_measure(q);
    worst = std::max(worst, (pi - nullspace_oracle(q)).cwiseAbs().maxCoeff());
  }
  check.expect(worst <= 1e-9, fmt::format("100 random matrices, max |pi - oracle| = {:.3g}", worst));

  double residual = 0.0;
  for (std::size_t m : {3u, 5u, 7u, 20u}) {
    const auto p = two_macro_preset(m, 1.0, false);
    const auto& two = std::get<TwoMacroModel>(p.model.kind());
    residual = std::max(residual, stationarity_residual(two.q0, invariant_measure(two.q0)));
    residual = std::max(residual, stationarity_residual(p.model.generator(), invariant_measure(p.model.generator())));
  }
  const auto ring = make_preset("ring-s3.2", {}, 1.0);
  const auto& rq = std::get<RingModel>(ring.model.kind()).q;
  residual = std::max(residual, stationarity_residual(rq, invariant_measure(rq)));
  const auto energy = make_preset("energy-s4.3", {}, 1.0);
  const auto& em = std::get<EnergyModel>(energy.model.kind());
  for (double e : em.levels()) {
    residual = std::max(residual, stationarity_residual(em.q, invariant_measure(em.q, em.level_class(e))));
  }
  check.expect(residual < 1e-12, fmt::format("max preset residual {:.3g} < 1e-12", residual));
  return check.result(10, "stationary solver vs nullspace oracle");
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 11
CriterionResult sweep_determinism(const ValidationOptions& options) {
  Check check;
  RunConfig config;
  config.preset = "two-macro-s2.3";
  config.epsilons = {1.0, 0.1};
  config.replicas = 2000;
  config.seed = 11011;
  config.jobs = options.jobs;
  std::ostringstream sink;
  std::vector<std::vector<std::string>> runs;
  for (int run = 0; run < 2; ++run) {
    config.output_dir = options.work_dir / fmt::format("determinism_{}", run);
    const auto result = run_sweep(config, sink);
    std::vector<std::string> files{slurp(result.csv)};
    for (const auto& h : result.histograms) files.push_back(slurp(h));
    runs.push_back(std::move(files));
  }
  check.expect(runs[0] == runs[1], fmt::format("{} files compared byte for byte", runs[0].size()));
  return check.result(11, "sweep determinism");
}

}  // namespace

std::vector<CriterionResult> run_validation(const ValidationOptions& options, std::ostream& log) {
  using Fn = std::function<CriterionResult(const ValidationOptions&)>;
  const std::vector<std::pair<int, Fn>> criteria{
      {1, effective_rates},   {2, exit_time_moments},    {3, l1_decay},
      {4, ring_limit},        {5, energy_limit},         {6, noise_floor},
      {7, martingale},        {8, homogeneous_coupling}, {9, conservation},
      {10, stationary_oracle}, {11, sweep_determinism}};
  std::vector<CriterionResult> results;
  for (const auto& [id, fn] : criteria) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    const auto started = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = fn(options);
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    fmt::print(log, "[{}] {:>2} {} ({:.1f}s)\n     {}\n", r.passed ? "PASS" : "FAIL", r.id, r.name,
               seconds, r.detail);
    log.flush();
    results.push_back(std::move(r));
  }
  return results;
}

std::string validation_json(const std::vector<CriterionResult>& results) {
  nlohmann::json doc;
  doc["passed"] = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  doc["criteria"] = nlohmann::json::array();
  for (const auto& r : results) {
    doc["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace mskmc
