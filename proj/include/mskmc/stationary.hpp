#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mskmc/intensity_matrix.hpp"

namespace mskmc {

template <typename Scalar>
using BasicProbabilityVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using ProbabilityVector = BasicProbabilityVector<double>;

namespace detail {

inline std::vector<StateIndex> normalize_support(std::vector<StateIndex> support,
                                                 Eigen::Index dim) {
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  if (support.empty()) throw std::invalid_argument("support must be nonempty");
  if (support.back() >= static_cast<StateIndex>(dim)) {
    throw BadDimension("support index " + std::to_string(support.back()) + " out of range");
  }
  return support;
}

template <typename Scalar>
bool reaches_all(const BasicIntensityMatrix<Scalar>& q, const std::vector<StateIndex>& support,
                 bool reverse) {
  const std::size_t k = support.size();
  std::vector<char> seen(k, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t a = stack.back();
    stack.pop_back();
    for (std::size_t b = 0; b < k; ++b) {
      if (seen[b]) continue;
      const auto i = static_cast<Eigen::Index>(support[reverse ? b : a]);
      const auto j = static_cast<Eigen::Index>(support[reverse ? a : b]);
      if (q(i, j) > Scalar(0)) {
        seen[b] = 1;
        ++count;
        stack.push_back(b);
      }
    }
  }
  return count == k;
}

}  // namespace detail

/// True iff the rate graph restricted to `support` is strongly connected.
template <typename Scalar>
bool is_irreducible(const BasicIntensityMatrix<Scalar>& q, std::vector<StateIndex> support) {
  support = detail::normalize_support(std::move(support), q.dim());
  return detail::reaches_all(q, support, false) && detail::reaches_all(q, support, true);
}

template <typename Scalar>
bool is_irreducible(const BasicIntensityMatrix<Scalar>& q) {
  std::vector<StateIndex> all(static_cast<std::size_t>(q.dim()));
  std::iota(all.begin(), all.end(), StateIndex{0});
  return is_irreducible(q, std::move(all));
}

/// Invariant probability of the chain restricted to `support`, returned over the
/// full state space with exact zeros off the support.
///
/// Solves pi^T (Q - Delta) = 0 with one balance equation replaced by the
/// normalization sum(pi) = 1, then applies one step of iterative refinement.
/// Delta uses row sums inside the support, so for a closed class (no rate
/// leaving it) this is the invariant measure of the full chain supported there.
/// Throws NotIrreducible when the restriction is not strongly connected.
template <typename Scalar>
BasicProbabilityVector<Scalar> invariant_measure(const BasicIntensityMatrix<Scalar>& q,
                                                 std::vector<StateIndex> support) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = BasicProbabilityVector<Scalar>;

  support = detail::normalize_support(std::move(support), q.dim());
  if (!is_irreducible(q, support)) throw NotIrreducible("rate matrix restricted to support");

  const auto k = static_cast<Eigen::Index>(support.size());
  Matrix g(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      g(a, b) = q(static_cast<Eigen::Index>(support[a]), static_cast<Eigen::Index>(support[b]));
    }
  }
  g.diagonal() -= g.rowwise().sum().eval();

  // Rows of the system are the balance equations (columns of g); the last is
  // swapped for the normalization.
  Matrix system = g.transpose();
  system.row(k - 1).setOnes();
  Vector rhs = Vector::Zero(k);
  rhs(k - 1) = Scalar(1);

  const Eigen::PartialPivLU<Matrix> lu(system);
  Vector local = lu.solve(rhs);
  local += lu.solve((rhs - system * local).eval());

  local = local.cwiseMax(Scalar(0));
  local /= local.sum();

  Vector pi = Vector::Zero(q.dim());
  for (Eigen::Index a = 0; a < k; ++a) pi(static_cast<Eigen::Index>(support[a])) = local(a);
  return pi;
}

template <typename Scalar>
BasicProbabilityVector<Scalar> invariant_measure(const BasicIntensityMatrix<Scalar>& q) {
  std::vector<StateIndex> all(static_cast<std::size_t>(q.dim()));
  std::iota(all.begin(), all.end(), StateIndex{0});
  return invariant_measure(q, std::move(all));
}

/// max_j |(pi^T (Q - Delta))_j| over the full space.
template <typename Scalar>
Scalar stationarity_residual(const BasicIntensityMatrix<Scalar>& q,
                             const BasicProbabilityVector<Scalar>& pi) {
  return (pi.transpose() * q.generator()).cwiseAbs().maxCoeff();
}

}  // namespace mskmc
