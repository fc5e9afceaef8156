#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mskmc/models.hpp"
#include "mskmc/stationary.hpp"

namespace mskmc {

/// Limit rates of the two-macro model: z -> 1 - z at lambda_z, the coupling
/// row sums averaged against the invariant measure of Q_z.
struct TwoMacroRates {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  ProbabilityVector pi0;
  ProbabilityVector pi1;
};

/// Limit biased walk on Z of the ring model.
struct RingRates {
  double lambda_l = 0.0;
  double lambda_r = 0.0;
  ProbabilityVector pi;
};

/// Limit chain of the first particle's energy at fixed total energy.
struct EnergyRates {
  double total_energy = 0.0;
  /// Admissible first-particle levels e (ascending) with E - e also a level.
  std::vector<double> levels;
  /// rates(a, b) = B_E(levels[a], levels[b]); zero diagonal.
  Eigen::MatrixXd rates;
  /// Single-particle invariant measure of each level in `all_levels`, over all
  /// spin words, zero off the level.
  std::vector<double> all_levels;
  std::vector<ProbabilityVector> level_measures;
};

using EffectiveDynamics = std::variant<TwoMacroRates, RingRates, EnergyRates>;

TwoMacroRates derive_two_macro(const TwoMacroModel& model);
RingRates derive_ring(const RingModel& model);
EnergyRates derive_energy(const EnergyModel& model, double total_energy);

/// Dispatches on the model family. `total_energy` is required for the energy model.
EffectiveDynamics derive(const MultiscaleModel& model,
                         std::optional<double> total_energy = std::nullopt);

/// The limit jump process, directly simulable. For the finite kinds `matrix`
/// holds the intensity matrix over the slow states (z in {0,1}, or the level
/// list); the ring limit is a lattice process with one micro-state.
struct LimitProcess {
  JumpProcess process;
  std::optional<IntensityMatrix> matrix;
};

LimitProcess limit_process(const EffectiveDynamics& effective);

/// Limit-process state whose slow value is `slow` (z, or first-particle energy).
StateIndex limit_state(const EffectiveDynamics& effective, double slow);

/// Exit rate of the limit process out of slow value `slow`, i.e. the parameter
/// of the limiting exponential law of the first exit time.
double limit_exit_rate(const EffectiveDynamics& effective, double slow);

/// Human-readable report of rates and invariant measures.
std::string format_report(const EffectiveDynamics& effective);

}  // namespace mskmc
