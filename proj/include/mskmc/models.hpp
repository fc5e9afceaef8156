#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mskmc/intensity_matrix.hpp"
#include "mskmc/process.hpp"

namespace mskmc {

/// Two macro-states {0,1}, each holding m micro-states. State index z*m + x.
struct TwoMacroModel {
  std::size_t m = 0;
  IntensityMatrix q0;
  IntensityMatrix q1;
  Eigen::MatrixXd c01;
  Eigen::MatrixXd c10;
  double epsilon = 1.0;

  StateIndex index(std::size_t x, int z) const { return static_cast<StateIndex>(z) * m + x; }
  std::size_t micro(StateIndex s) const { return s % m; }
  int macro(StateIndex s) const { return static_cast<int>(s / m); }

  const IntensityMatrix& internal(int z) const { return z == 0 ? q0 : q1; }
  /// Coupling block from macro-state z to 1 - z.
  const Eigen::MatrixXd& coupling(int z) const { return z == 0 ? c01 : c10; }
  /// Row sums of the coupling out of macro-state z, one per micro-state.
  Eigen::VectorXd coupling_row_sums(int z) const { return coupling(z).rowwise().sum(); }

  /// Time-rescaled 2m x 2m matrix [[Q0/eps, C01], [C10, Q1/eps]].
  IntensityMatrix generator() const;
};

/// Translation-invariant chain of macro-states indexed by Z, m micro-states each.
/// States are encoded through LatticeKernel (index = m * zigzag(z) + x).
struct RingModel {
  std::size_t m = 0;
  IntensityMatrix q;
  Eigen::MatrixXd cl;
  Eigen::MatrixXd cr;
  double epsilon = 1.0;

  LatticeKernel kernel() const;
  StateIndex index(std::size_t x, std::int64_t z) const;
  LatticeState decode(StateIndex s) const;
};

/// Two particles of k spins each exchanging energy. Single-particle states are
/// spin words w in [0, 2^k), spin j of the word being bit j. Pair state index
/// is x * 2^k + z.
struct EnergyModel {
  unsigned k = 0;
  std::vector<double> energy;  // indexed by spin word
  double tolerance = 0.0;      // absolute tolerance for energy equality
  IntensityMatrix q;           // single-particle internal dynamics
  Eigen::MatrixXd c;           // coupling over pair states
  double epsilon = 1.0;

  std::size_t words() const { return std::size_t{1} << k; }
  StateIndex index(std::size_t x, std::size_t z) const { return x * words() + z; }
  std::size_t first(StateIndex s) const { return s / words(); }
  std::size_t second(StateIndex s) const { return s % words(); }

  bool same_energy(double a, double b) const { return std::abs(a - b) <= tolerance; }

  /// Distinct single-particle energies, ascending.
  std::vector<double> levels() const;
  /// Spin words with the given energy.
  std::vector<StateIndex> level_class(double e) const;

  /// eps^-1 * Qbar0 + C, where Qbar0 moves one particle at a time by Q.
  IntensityMatrix generator() const;
};

/// Immutable multiscale model: one of the three model families, with the
/// assembled generator cached for the finite ones.
class MultiscaleModel {
 public:
  using Kind = std::variant<TwoMacroModel, RingModel, EnergyModel>;

  explicit MultiscaleModel(Kind kind);

  const Kind& kind() const { return kind_; }
  double epsilon() const;
  std::string family() const;

  /// Same matrices, different time-scale ratio.
  MultiscaleModel with_epsilon(double epsilon) const;

  /// Finite-model generator; throws std::logic_error for the ring model.
  const IntensityMatrix& generator() const;

  double slow_observable(StateIndex state) const;
  std::string label(StateIndex state) const;
  JumpProcess process() const;

 private:
  Kind kind_;
  IntensityMatrix generator_;
};

using EnergyFunction = std::function<double(std::uint64_t word)>;

/// Number of up spins in the word.
double spin_sum(std::uint64_t word);

MultiscaleModel build_two_macro(std::size_t m, const IntensityMatrix& q0,
                                const IntensityMatrix& q1, const Eigen::MatrixXd& c01,
                                const Eigen::MatrixXd& c10, double epsilon);

/// Nearest-neighbour wells (tridiagonal Q, rate q) with the first and last
/// micro-states coupled across the barrier at rate c: C[0][m-1] = C[m-1][0] = c.
MultiscaleModel build_reference_two_macro(std::size_t m, double q, double c, double epsilon);

MultiscaleModel build_ring(std::size_t m, const IntensityMatrix& q, const Eigen::MatrixXd& cl,
                           const Eigen::MatrixXd& cr, double epsilon);

/// Tridiagonal Q; left coupling C_l[0][m-1] = c_l, right coupling C_r[m-1][0] = c_r.
MultiscaleModel build_reference_ring(std::size_t m, double q, double c_l, double c_r,
                                 double epsilon);

MultiscaleModel build_energy(unsigned k, const EnergyFunction& energy, const IntensityMatrix& q,
                             const Eigen::MatrixXd& c, double epsilon, double tolerance = 0.0);

struct EnergyPresetRates {
  double q1 = 10.0;  // up-down -> down-up
  double q2 = 1.0;   // down-up -> up-down
  double c1 = 1.0;   // exchanges out of pairs whose first particle is up-down
  double c2 = 0.2;   // every other energy exchange
};

/// k = 2 spins per particle, energy = number of up spins.
MultiscaleModel build_reference_energy(double epsilon, const EnergyPresetRates& rates = {});

/// Spin word of a k = 2 particle from its conventional label 1..4
/// (down-down, up-down, down-up, up-up).
inline std::uint64_t spin_word_from_label(int label) { return static_cast<std::uint64_t>(label - 1); }

/// z for the two-macro and ring models, the first particle's energy for the
/// energy model.
inline double slow_observable(const MultiscaleModel& model, StateIndex state) {
  return model.slow_observable(state);
}

}  // namespace mskmc

namespace mskmc {

/// Parameters of the bundled presets; each preset reads only its own fields.
struct PresetParams {
  std::size_t m = 5;
  double q = 1.0;
  double c = 1.0;
  double c_l = 1.0;
  double c_r = 2.0;
  EnergyPresetRates energy;
};

struct Preset {
  std::string name;
  MultiscaleModel model;
  StateIndex initial_state;
};

/// Names accepted by make_preset: "two-macro-s2.3", "ring-s3.2", "energy-s4.3".
const std::vector<std::string>& preset_names();

/// Builds a bundled preset at the given epsilon. The initial state is (0,0) for
/// the two-macro and ring presets, and (up-down, down-down) for the energy
/// preset. Throws std::invalid_argument for an unknown name.
Preset make_preset(const std::string& name, const PresetParams& params, double epsilon);

}  // namespace mskmc
