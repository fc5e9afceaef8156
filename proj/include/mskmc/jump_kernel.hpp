#pragma once

#include <concepts>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mskmc/intensity_matrix.hpp"

namespace mskmc {

/// What the simulator needs from a rate source: the exit rate of a state and
/// the target picked by a uniform u in (0,1) on the cumulative outgoing row.
template <class K>
concept JumpKernel = requires(const K& kernel, StateIndex state, double u) {
  { kernel.exit_rate(state) } -> std::convertible_to<double>;
  { kernel.select(state, u) } -> std::same_as<StateIndex>;
};

/// Sparse row-compressed copy of a finite IntensityMatrix, built once per
/// simulation so that the event loop only touches nonzero rates.
class DenseKernel {
 public:
  DenseKernel() = default;

  explicit DenseKernel(const IntensityMatrix& q) {
    const Eigen::Index n = q.dim();
    row_start_.reserve(static_cast<std::size_t>(n) + 1);
    exit_.reserve(static_cast<std::size_t>(n));
    row_start_.push_back(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      double total = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double r = q(i, j);
        if (r > 0.0) {
          target_.push_back(static_cast<StateIndex>(j));
          rate_.push_back(r);
          total += r;
        }
      }
      exit_.push_back(total);
      row_start_.push_back(target_.size());
    }
  }

  std::size_t size() const { return exit_.size(); }

  double exit_rate(StateIndex state) const { return exit_[state]; }

  StateIndex select(StateIndex state, double u) const {
    const std::size_t begin = row_start_[state];
    const std::size_t end = row_start_[state + 1];
    const double threshold = u * exit_[state];
    double acc = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      acc += rate_[k];
      if (threshold < acc) return target_[k];
    }
    // u * q can round up to the full row sum.
    return target_[end - 1];
  }

 private:
  std::vector<std::size_t> row_start_;
  std::vector<StateIndex> target_;
  std::vector<double> rate_;
  std::vector<double> exit_;
};

/// Micro state and signed macro label of a lattice process on M x Z.
struct LatticeState {
  std::uint64_t x = 0;
  std::int64_t z = 0;

  bool operator==(const LatticeState&) const = default;
};

/// Translation-invariant jump kernel on M x Z with nearest-neighbour macro moves.
///
/// States are encoded as index = m * zigzag(z) + x, with zigzag(z) = 2z for
/// z >= 0 and -2z - 1 for z < 0. This is a bijection onto the naturals, so the
/// unbounded lattice needs no storage window; every row is read from the same
/// three m x m blocks.
class LatticeKernel {
 public:
  LatticeKernel() = default;

  /// `within`, `left`, `right`: rates to (x', z), (x', z - 1), (x', z + 1).
  LatticeKernel(const Eigen::MatrixXd& within, const Eigen::MatrixXd& left,
                const Eigen::MatrixXd& right)
      : m_(static_cast<std::uint64_t>(within.rows())) {
    row_start_.push_back(0);
    for (Eigen::Index x = 0; x < within.rows(); ++x) {
      double total = 0.0;
      auto add = [&](const Eigen::MatrixXd& block, std::int64_t dz) {
        for (Eigen::Index y = 0; y < block.cols(); ++y) {
          const double r = block(x, y);
          if (dz == 0 && x == y) continue;
          if (r > 0.0) {
            moves_.push_back({static_cast<std::uint64_t>(y), dz, r});
            total += r;
          }
        }
      };
      add(within, 0);
      add(left, -1);
      add(right, +1);
      exit_.push_back(total);
      row_start_.push_back(moves_.size());
    }
  }

  std::uint64_t micro_states() const { return m_; }

  static std::uint64_t zigzag(std::int64_t z) {
    return z >= 0 ? 2 * static_cast<std::uint64_t>(z) : 2 * static_cast<std::uint64_t>(-z) - 1;
  }

  static std::int64_t unzigzag(std::uint64_t k) {
    return (k % 2 == 0) ? static_cast<std::int64_t>(k / 2) : -static_cast<std::int64_t>((k + 1) / 2);
  }

  StateIndex encode(LatticeState s) const { return m_ * zigzag(s.z) + s.x; }
  LatticeState decode(StateIndex index) const { return {index % m_, unzigzag(index / m_)}; }

  double exit_rate(StateIndex state) const { return exit_[state % m_]; }

  StateIndex select(StateIndex state, double u) const {
    const LatticeState s = decode(state);
    const std::size_t begin = row_start_[s.x];
    const std::size_t end = row_start_[s.x + 1];
    const double threshold = u * exit_[s.x];
    double acc = 0.0;
    std::size_t k = begin;
    for (; k < end; ++k) {
      acc += moves_[k].rate;
      if (threshold < acc) break;
    }
    if (k == end) k = end - 1;
    return encode({moves_[k].x, s.z + moves_[k].dz});
  }

 private:
  struct Move {
    std::uint64_t x;
    std::int64_t dz;
    double rate;
  };

  std::uint64_t m_ = 0;
  std::vector<std::size_t> row_start_;
  std::vector<Move> moves_;
  std::vector<double> exit_;
};

static_assert(JumpKernel<DenseKernel>);
static_assert(JumpKernel<LatticeKernel>);

}  // namespace mskmc
