#include "mskmc/effective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace mskmc {
namespace {

double averaged_row_sum(const Eigen::MatrixXd& coupling, const ProbabilityVector& pi) {
  return pi.dot(coupling.rowwise().sum());
}

std::size_t find_level(const EnergyModel& model, const std::vector<double>& levels, double e) {
  for (std::size_t a = 0; a < levels.size(); ++a) {
    if (model.same_energy(levels[a], e)) return a;
  }
  return levels.size();
}

std::string format_vector(const ProbabilityVector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    s += fmt::format("{}{:.17g}", i ? ", " : "", v(i));
  }
  return s + "]";
}

}  // namespace

TwoMacroRates derive_two_macro(const TwoMacroModel& model) {
  TwoMacroRates out;
  try {
    out.pi0 = invariant_measure(model.q0);
  } catch (const NotIrreducible&) {
    throw NotIrreducible("Q0");
  }
  try {
    out.pi1 = invariant_measure(model.q1);
  } catch (const NotIrreducible&) {
    throw NotIrreducible("Q1");
  }
  out.lambda0 = averaged_row_sum(model.c01, out.pi0);
  out.lambda1 = averaged_row_sum(model.c10, out.pi1);
  return out;
}

RingRates derive_ring(const RingModel& model) {
  RingRates out;
  try {
    out.pi = invariant_measure(model.q);
  } catch (const NotIrreducible&) {
    throw NotIrreducible("Q");
  }
  out.lambda_l = averaged_row_sum(model.cl, out.pi);
  out.lambda_r = averaged_row_sum(model.cr, out.pi);
  return out;
}

EnergyRates derive_energy(const EnergyModel& model, double total_energy) {
  EnergyRates out;
  out.total_energy = total_energy;
  out.all_levels = model.levels();
  for (double e : out.all_levels) {
    try {
      out.level_measures.push_back(invariant_measure(model.q, model.level_class(e)));
    } catch (const NotIrreducible&) {
      throw NotIrreducible(fmt::format("Q on energy class {}", e));
    }
  }

  std::vector<std::size_t> first_level;   // index into all_levels of e
  std::vector<std::size_t> second_level;  // index into all_levels of E - e
  for (std::size_t a = 0; a < out.all_levels.size(); ++a) {
    const std::size_t partner = find_level(model, out.all_levels, total_energy - out.all_levels[a]);
    if (partner == out.all_levels.size()) continue;
    out.levels.push_back(out.all_levels[a]);
    first_level.push_back(a);
    second_level.push_back(partner);
  }
  if (out.levels.empty()) throw InadmissibleEnergy(total_energy);

  const std::size_t n = model.words();
  const auto k = static_cast<Eigen::Index>(out.levels.size());
  out.rates = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto& pi_x = out.level_measures[first_level[a]];
    const auto& pi_z = out.level_measures[second_level[a]];
    for (Eigen::Index b = 0; b < k; ++b) {
      if (a == b) continue;
      double rate = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t z = 0; z < n; ++z) {
          const double weight = pi_x(static_cast<Eigen::Index>(x)) * pi_z(static_cast<Eigen::Index>(z));
          if (weight == 0.0) continue;
          double flux = 0.0;
          for (std::size_t x2 = 0; x2 < n; ++x2) {
            if (!model.same_energy(model.energy[x2], out.levels[b])) continue;
            for (std::size_t z2 = 0; z2 < n; ++z2) {
              if (!model.same_energy(model.energy[z2], total_energy - out.levels[b])) continue;
              flux += model.c(static_cast<Eigen::Index>(model.index(x, z)),
                              static_cast<Eigen::Index>(model.index(x2, z2)));
            }
          }
          rate += weight * flux;
        }
      }
      out.rates(a, b) = rate;
    }
  }
  return out;
}

EffectiveDynamics derive(const MultiscaleModel& model, std::optional<double> total_energy) {
  const auto& kind = model.kind();
  if (const auto* two = std::get_if<TwoMacroModel>(&kind)) return derive_two_macro(*two);
  if (const auto* ring = std::get_if<RingModel>(&kind)) return derive_ring(*ring);
  if (!total_energy) throw std::invalid_argument("the energy model needs a total energy");
  return derive_energy(std::get<EnergyModel>(kind), *total_energy);
}

LimitProcess limit_process(const EffectiveDynamics& effective) {
  if (const auto* two = std::get_if<TwoMacroRates>(&effective)) {
    Eigen::MatrixXd q(2, 2);
    q << 0.0, two->lambda0, two->lambda1, 0.0;
    IntensityMatrix matrix(q, "limit two-macro");
    FiniteProcess p{DenseKernel(matrix), {0.0, 1.0}, {"0", "1"}};
    return {std::move(p), std::move(matrix)};
  }
  if (const auto* ring = std::get_if<RingRates>(&effective)) {
    const Eigen::MatrixXd none = Eigen::MatrixXd::Zero(1, 1);
    const Eigen::MatrixXd left = Eigen::MatrixXd::Constant(1, 1, ring->lambda_l);
    const Eigen::MatrixXd right = Eigen::MatrixXd::Constant(1, 1, ring->lambda_r);
    return {LatticeProcess{LatticeKernel(none, left, right)}, std::nullopt};
  }
  const auto& energy = std::get<EnergyRates>(effective);
  IntensityMatrix matrix(energy.rates, "limit energy");
  FiniteProcess p;
  p.kernel = DenseKernel(matrix);
  p.slow = energy.levels;
  for (double e : energy.levels) p.labels.push_back(fmt::format("{}", e));
  return {std::move(p), std::move(matrix)};
}

StateIndex limit_state(const EffectiveDynamics& effective, double slow) {
  if (std::holds_alternative<TwoMacroRates>(effective)) {
    if (slow != 0.0 && slow != 1.0) throw std::invalid_argument("two-macro slow value must be 0 or 1");
    return static_cast<StateIndex>(slow);
  }
  if (std::holds_alternative<RingRates>(effective)) {
    return LatticeKernel::zigzag(static_cast<std::int64_t>(std::llround(slow)));
  }
  const auto& energy = std::get<EnergyRates>(effective);
  auto best = std::min_element(energy.levels.begin(), energy.levels.end(),
                               [slow](double a, double b) {
                                 return std::abs(a - slow) < std::abs(b - slow);
                               });
  if (best == energy.levels.end() || std::abs(*best - slow) > 1e-9 * (1.0 + std::abs(slow))) {
    throw std::invalid_argument(fmt::format("energy {} is not an admissible level", slow));
  }
  return static_cast<StateIndex>(best - energy.levels.begin());
}

double limit_exit_rate(const EffectiveDynamics& effective, double slow) {
  if (const auto* two = std::get_if<TwoMacroRates>(&effective)) {
    return limit_state(effective, slow) == 0 ? two->lambda0 : two->lambda1;
  }
  if (const auto* ring = std::get_if<RingRates>(&effective)) {
    return ring->lambda_l + ring->lambda_r;
  }
  const auto& energy = std::get<EnergyRates>(effective);
  return energy.rates.row(static_cast<Eigen::Index>(limit_state(effective, slow))).sum();
}

std::string format_report(const EffectiveDynamics& effective) {
  std::string out;
  if (const auto* two = std::get_if<TwoMacroRates>(&effective)) {
    out += "kind = two-macro\n";
    out += fmt::format("pi0 = {}\n", format_vector(two->pi0));
    out += fmt::format("pi1 = {}\n", format_vector(two->pi1));
    out += fmt::format("lambda0 = {:.17g}\n", two->lambda0);
    out += fmt::format("lambda1 = {:.17g}\n", two->lambda1);
    return out;
  }
  if (const auto* ring = std::get_if<RingRates>(&effective)) {
    out += "kind = ring\n";
    out += fmt::format("pi = {}\n", format_vector(ring->pi));
    out += fmt::format("lambda_l = {:.17g}\n", ring->lambda_l);
    out += fmt::format("lambda_r = {:.17g}\n", ring->lambda_r);
    return out;
  }
  const auto& energy = std::get<EnergyRates>(effective);
  out += "kind = energy\n";
  out += fmt::format("total_energy = {:.17g}\n", energy.total_energy);
  for (std::size_t a = 0; a < energy.all_levels.size(); ++a) {
    out += fmt::format("pi[e={}] = {}\n", energy.all_levels[a], format_vector(energy.level_measures[a]));
  }
  std::string levels;
  for (std::size_t a = 0; a < energy.levels.size(); ++a) {
    levels += fmt::format("{}{}", a ? ", " : "", energy.levels[a]);
  }
  out += fmt::format("levels = [{}]\n", levels);
  for (Eigen::Index a = 0; a < energy.rates.rows(); ++a) {
    for (Eigen::Index b = 0; b < energy.rates.cols(); ++b) {
      if (a == b) continue;
      out += fmt::format("B({},{}) = {:.17g}\n", energy.levels[static_cast<std::size_t>(a)],
                         energy.levels[static_cast<std::size_t>(b)], energy.rates(a, b));
    }
  }
  return out;
}

}  // namespace mskmc
