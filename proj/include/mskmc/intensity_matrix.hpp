#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "mskmc/errors.hpp"

namespace mskmc {

/// Index of a state in a finite (or, for lattice models, countable) enumeration.
using StateIndex = std::uint64_t;

/// Nonnegative rate matrix of a jump process under the zero-diagonal convention.
///
/// The diagonal carries no information for a jump process, so it is cleared on
/// construction; the generator proper is `rates() - diag(row sums)`.
template <typename Scalar>
class BasicIntensityMatrix {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicIntensityMatrix() = default;

  /// Throws BadDimension for non-square input and NegativeRate for any
  /// negative or non-finite off-diagonal entry. `name` labels the error.
  explicit BasicIntensityMatrix(Matrix rates, const std::string& name = "Q")
      : rates_(std::move(rates)) {
    if (rates_.rows() != rates_.cols()) {
      throw BadDimension(name + " must be square, got " + std::to_string(rates_.rows()) +
                         "x" + std::to_string(rates_.cols()));
    }
    for (Eigen::Index i = 0; i < rates_.rows(); ++i) {
      rates_(i, i) = Scalar(0);
      for (Eigen::Index j = 0; j < rates_.cols(); ++j) {
        const Scalar r = rates_(i, j);
        if (!(r >= Scalar(0)) || !std::isfinite(static_cast<double>(r))) {
          throw NegativeRate(name, static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                             static_cast<double>(r));
        }
      }
    }
  }

  static BasicIntensityMatrix zero(Eigen::Index dim) {
    return BasicIntensityMatrix(Matrix::Zero(dim, dim));
  }

  Eigen::Index dim() const { return rates_.rows(); }
  const Matrix& rates() const { return rates_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return rates_(i, j); }

  Vector exit_rates() const { return rates_.rowwise().sum(); }

  /// Q - Delta, with Delta the diagonal matrix of row sums.
  Matrix generator() const {
    Matrix g = rates_;
    g.diagonal() -= exit_rates();
    return g;
  }

  BasicIntensityMatrix scaled(Scalar factor) const {
    return BasicIntensityMatrix(rates_ * factor);
  }

  bool operator==(const BasicIntensityMatrix& other) const {
    return rates_.rows() == other.rates_.rows() && rates_.cols() == other.rates_.cols() &&
           rates_ == other.rates_;
  }

 private:
  Matrix rates_;
};

using IntensityMatrix = BasicIntensityMatrix<double>;

/// Total rate of leaving state `i`.
template <typename Scalar>
Scalar exit_rate(const BasicIntensityMatrix<Scalar>& q, StateIndex i) {
  return q.rates().row(static_cast<Eigen::Index>(i)).sum();
}

/// Tridiagonal nearest-neighbour matrix with rate `rate` on both off-diagonals.
inline IntensityMatrix tridiagonal(Eigen::Index dim, double rate) {
  IntensityMatrix::Matrix q = IntensityMatrix::Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i + 1 < dim; ++i) {
    q(i, i + 1) = rate;
    q(i + 1, i) = rate;
  }
  return IntensityMatrix(std::move(q));
}

}  // namespace mskmc
