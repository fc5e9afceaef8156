#include "mskmc/models.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include <fmt/format.h>

#include "mskmc/stationary.hpp"

namespace mskmc {
namespace {

void require_positive_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ModelError(fmt::format("epsilon must be positive and finite, got {}", epsilon));
  }
}

void require_shape(const Eigen::MatrixXd& a, std::size_t n, const std::string& name) {
  if (a.rows() != static_cast<Eigen::Index>(n) || a.cols() != static_cast<Eigen::Index>(n)) {
    throw BadDimension(fmt::format("{} must be {}x{}, got {}x{}", name, n, n, a.rows(), a.cols()));
  }
}

void require_nonnegative(const Eigen::MatrixXd& a, const std::string& name) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (!(a(i, j) >= 0.0) || !std::isfinite(a(i, j))) {
        throw NegativeRate(name, static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                           a(i, j));
      }
    }
  }
}

void require_irreducible(const IntensityMatrix& q, const std::string& name) {
  if (!is_irreducible(q)) throw NotIrreducible(name);
}

std::string spin_string(std::size_t word, unsigned k) {
  std::string s;
  for (unsigned j = 0; j < k; ++j) s += ((word >> j) & 1u) ? 'u' : 'd';
  return s;
}

}  // namespace

IntensityMatrix TwoMacroModel::generator() const {
  const auto n = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  g.topLeftCorner(n, n) = q0.rates() / epsilon;
  g.topRightCorner(n, n) = c01;
  g.bottomLeftCorner(n, n) = c10;
  g.bottomRightCorner(n, n) = q1.rates() / epsilon;
  return IntensityMatrix(std::move(g), "two-macro generator");
}

LatticeKernel RingModel::kernel() const {
  return LatticeKernel(q.rates() / epsilon, cl, cr);
}

StateIndex RingModel::index(std::size_t x, std::int64_t z) const {
  return m * LatticeKernel::zigzag(z) + x;
}

LatticeState RingModel::decode(StateIndex s) const {
  return {s % m, LatticeKernel::unzigzag(s / m)};
}

std::vector<double> EnergyModel::levels() const {
  std::vector<double> sorted = energy;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  for (double e : sorted) {
    if (out.empty() || !same_energy(out.back(), e)) out.push_back(e);
  }
  return out;
}

std::vector<StateIndex> EnergyModel::level_class(double e) const {
  std::vector<StateIndex> out;
  for (std::size_t w = 0; w < energy.size(); ++w) {
    if (same_energy(energy[w], e)) out.push_back(w);
  }
  return out;
}

IntensityMatrix EnergyModel::generator() const {
  const std::size_t n = words();
  Eigen::MatrixXd g = c;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t z = 0; z < n; ++z) {
      const auto from = static_cast<Eigen::Index>(index(x, z));
      for (std::size_t y = 0; y < n; ++y) {
        if (y != x) g(from, static_cast<Eigen::Index>(index(y, z))) += q(x, y) / epsilon;
        if (y != z) g(from, static_cast<Eigen::Index>(index(x, y))) += q(z, y) / epsilon;
      }
    }
  }
  return IntensityMatrix(std::move(g), "energy generator");
}

MultiscaleModel::MultiscaleModel(Kind kind) : kind_(std::move(kind)) {
  std::visit(
      [this](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        require_positive_epsilon(k.epsilon);
        if constexpr (!std::is_same_v<T, RingModel>) generator_ = k.generator();
      },
      kind_);
}

double MultiscaleModel::epsilon() const {
  return std::visit([](const auto& k) { return k.epsilon; }, kind_);
}

std::string MultiscaleModel::family() const {
  switch (kind_.index()) {
    case 0: return "two-macro";
    case 1: return "ring";
    default: return "energy";
  }
}

MultiscaleModel MultiscaleModel::with_epsilon(double epsilon) const {
  Kind copy = kind_;
  std::visit([epsilon](auto& k) { k.epsilon = epsilon; }, copy);
  return MultiscaleModel(std::move(copy));
}

const IntensityMatrix& MultiscaleModel::generator() const {
  if (std::holds_alternative<RingModel>(kind_)) {
    throw std::logic_error("the ring model has no finite generator");
  }
  return generator_;
}

double MultiscaleModel::slow_observable(StateIndex state) const {
  if (const auto* two = std::get_if<TwoMacroModel>(&kind_)) return two->macro(state);
  if (const auto* ring = std::get_if<RingModel>(&kind_)) {
    return static_cast<double>(ring->decode(state).z);
  }
  const auto& energy = std::get<EnergyModel>(kind_);
  return energy.energy.at(energy.first(state));
}

std::string MultiscaleModel::label(StateIndex state) const {
  if (const auto* two = std::get_if<TwoMacroModel>(&kind_)) {
    return fmt::format("({},{})", two->micro(state), two->macro(state));
  }
  if (const auto* ring = std::get_if<RingModel>(&kind_)) {
    const auto s = ring->decode(state);
    return fmt::format("({},{})", s.x, s.z);
  }
  const auto& energy = std::get<EnergyModel>(kind_);
  return fmt::format("({},{})", spin_string(energy.first(state), energy.k),
                     spin_string(energy.second(state), energy.k));
}

JumpProcess MultiscaleModel::process() const {
  if (const auto* ring = std::get_if<RingModel>(&kind_)) {
    return LatticeProcess{ring->kernel()};
  }
  FiniteProcess p;
  p.kernel = DenseKernel(generator_);
  const auto n = static_cast<StateIndex>(generator_.dim());
  p.slow.reserve(n);
  p.labels.reserve(n);
  for (StateIndex s = 0; s < n; ++s) {
    p.slow.push_back(slow_observable(s));
    p.labels.push_back(label(s));
  }
  return p;
}

double spin_sum(std::uint64_t word) { return static_cast<double>(std::popcount(word)); }

MultiscaleModel build_two_macro(std::size_t m, const IntensityMatrix& q0,
                                const IntensityMatrix& q1, const Eigen::MatrixXd& c01,
                                const Eigen::MatrixXd& c10, double epsilon) {
  if (m == 0) throw BadDimension("m must be positive");
  require_shape(q0.rates(), m, "Q0");
  require_shape(q1.rates(), m, "Q1");
  require_shape(c01, m, "C01");
  require_shape(c10, m, "C10");
  require_nonnegative(c01, "C01");
  require_nonnegative(c10, "C10");
  require_irreducible(q0, "Q0");
  require_irreducible(q1, "Q1");
  return MultiscaleModel(TwoMacroModel{m, q0, q1, c01, c10, epsilon});
}

namespace {

Eigen::MatrixXd corner(std::size_t m, double top_right, double bottom_left) {
  const auto n = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  c(0, n - 1) += top_right;
  c(n - 1, 0) += bottom_left;
  return c;
}

}  // namespace

MultiscaleModel build_reference_two_macro(std::size_t m, double q, double c, double epsilon) {
  if (m < 2) throw BadDimension("the nearest-neighbour two-macro model needs m >= 2");
  const IntensityMatrix wells = tridiagonal(static_cast<Eigen::Index>(m), q);
  const Eigen::MatrixXd coupling = corner(m, c, c);
  return build_two_macro(m, wells, wells, coupling, coupling, epsilon);
}

MultiscaleModel build_ring(std::size_t m, const IntensityMatrix& q, const Eigen::MatrixXd& cl,
                           const Eigen::MatrixXd& cr, double epsilon) {
  if (m == 0) throw BadDimension("m must be positive");
  require_shape(q.rates(), m, "Q");
  require_shape(cl, m, "Cl");
  require_shape(cr, m, "Cr");
  require_nonnegative(cl, "Cl");
  require_nonnegative(cr, "Cr");
  require_irreducible(q, "Q");
  return MultiscaleModel(RingModel{m, q, cl, cr, epsilon});
}

MultiscaleModel build_reference_ring(std::size_t m, double q, double c_l, double c_r,
                                 double epsilon) {
  if (m < 2) throw BadDimension("the nearest-neighbour ring model needs m >= 2");
  return build_ring(m, tridiagonal(static_cast<Eigen::Index>(m), q), corner(m, c_l, 0.0),
                    corner(m, 0.0, c_r), epsilon);
}

MultiscaleModel build_energy(unsigned k, const EnergyFunction& energy, const IntensityMatrix& q,
                             const Eigen::MatrixXd& c, double epsilon, double tolerance) {
  if (k == 0 || k > 5) throw BadDimension("spins per particle must be in [1, 5]");
  if (!(tolerance >= 0.0)) throw ModelError("energy tolerance must be >= 0");
  EnergyModel model;
  model.k = k;
  model.tolerance = tolerance;
  model.epsilon = epsilon;
  const std::size_t n = model.words();
  model.energy.reserve(n);
  for (std::size_t w = 0; w < n; ++w) model.energy.push_back(energy(w));

  require_shape(q.rates(), n, "Q");
  require_shape(c, n * n, "C");
  require_nonnegative(c, "C");

  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (q(x, y) > 0.0 && !model.same_energy(model.energy[x], model.energy[y])) {
        throw EnergyNotConserved("Q", x, y);
      }
    }
  }
  for (std::size_t from = 0; from < n * n; ++from) {
    for (std::size_t to = 0; to < n * n; ++to) {
      if (!(c(from, to) > 0.0)) continue;
      const double ex = model.energy[from / n], ez = model.energy[from % n];
      const double ex2 = model.energy[to / n], ez2 = model.energy[to % n];
      if (!model.same_energy(ex + ez, ex2 + ez2) || model.same_energy(ex, ex2)) {
        throw EnergyNotConserved("C", from, to);
      }
    }
  }

  model.q = q;
  model.c = c;
  for (double e : model.levels()) {
    const auto cls = model.level_class(e);
    if (cls.size() > 1 && !is_irreducible(q, cls)) {
      throw NotIrreducible(fmt::format("Q on energy class {}", e));
    }
  }
  return MultiscaleModel(std::move(model));
}

MultiscaleModel build_reference_energy(double epsilon, const EnergyPresetRates& rates) {
  constexpr unsigned k = 2;
  constexpr std::size_t n = 4;
  const std::uint64_t up_down = spin_word_from_label(2);
  const std::uint64_t down_up = spin_word_from_label(3);

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  q(up_down, down_up) = rates.q1;
  q(down_up, up_down) = rates.q2;

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n * n, n * n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t z = 0; z < n; ++z) {
      for (std::size_t x2 = 0; x2 < n; ++x2) {
        for (std::size_t z2 = 0; z2 < n; ++z2) {
          const double ex = spin_sum(x), ex2 = spin_sum(x2);
          if (spin_sum(x) + spin_sum(z) != spin_sum(x2) + spin_sum(z2) || ex == ex2) continue;
          c(x * n + z, x2 * n + z2) = (x == up_down) ? rates.c1 : rates.c2;
        }
      }
    }
  }
  return build_energy(k, spin_sum, IntensityMatrix(q, "Q"), c, epsilon);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"two-macro-s2.3", "ring-s3.2", "energy-s4.3"};
  return names;
}

Preset make_preset(const std::string& name, const PresetParams& params, double epsilon) {
  if (name == "two-macro-s2.3") {
    auto model = build_reference_two_macro(params.m, params.q, params.c, epsilon);
    return {name, std::move(model), 0};
  }
  if (name == "ring-s3.2") {
    auto model = build_reference_ring(params.m, params.q, params.c_l, params.c_r, epsilon);
    return {name, std::move(model), 0};
  }
  if (name == "energy-s4.3") {
    auto model = build_reference_energy(epsilon, params.energy);
    const auto& e = std::get<EnergyModel>(model.kind());
    const StateIndex start = e.index(spin_word_from_label(2), spin_word_from_label(1));
    return {name, std::move(model), start};
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace mskmc
