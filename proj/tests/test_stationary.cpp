#include <doctest.h>

#include <random>

#include "mskmc/errors.hpp"
#include "mskmc/stationary.hpp"

using namespace mskmc;

namespace {

// Power iteration on the uniformized chain P = I + G / (1.1 max exit rate).
Eigen::VectorXd uniformized_oracle(const IntensityMatrix& q) {
  const Eigen::MatrixXd g = q.generator();
  const double lambda = 1.1 * q.exit_rates().maxCoeff();
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(q.dim(), q.dim()) + g / lambda;
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Constant(q.dim(), 1.0 / double(q.dim()));
  for (int i = 0; i < 20000; ++i) v = v * p;
  return v.transpose() / v.sum();
}

}  // namespace

TEST_CASE("two-state chain: pi = (b, a) / (a + b)") {
  Eigen::MatrixXd a(2, 2);
  a << 0, 3,
       1, 0;
  const auto pi = invariant_measure(IntensityMatrix(a));
  CHECK(pi(0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(pi(1) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("birth-death chain satisfies the product formula") {
  constexpr int n = 6;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> weight{1.0};
  for (int i = 0; i + 1 < n; ++i) {
    const double up = 1.0 + i, down = 2.0 + 0.5 * i;
    a(i, i + 1) = up;
    a(i + 1, i) = down;
    weight.push_back(weight.back() * up / down);
  }
  double total = 0.0;
  for (double w : weight) total += w;
  const auto pi = invariant_measure(IntensityMatrix(a));
  for (int i = 0; i < n; ++i) CHECK(std::abs(pi(i) - weight[i] / total) < 1e-14);
}

TEST_CASE("matches the uniformized power iteration on random chains") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> rate(0.1, 5.0);
  std::bernoulli_distribution keep(0.6);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + trial % 5;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && keep(gen)) a(i, j) = rate(gen);
      }
      a(i, (i + 1) % n) = rate(gen);
    }
    const IntensityMatrix q(a);
    REQUIRE(is_irreducible(q));
    const auto pi = invariant_measure(q);
    CHECK((pi - uniformized_oracle(q)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(stationarity_residual(q, pi) < 1e-12);
  }
}

TEST_CASE("irreducibility detection") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 2) = 1;
  const IntensityMatrix q(a);
  CHECK_FALSE(is_irreducible(q));
  CHECK(is_irreducible(q, {0, 1}));
  CHECK_FALSE(is_irreducible(q, {1, 2}));
  CHECK(is_irreducible(q, {2}));
  CHECK_THROWS_AS(invariant_measure(q), NotIrreducible);
}

TEST_CASE("measure restricted to a closed class") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a(1, 2) = 10;
  a(2, 1) = 1;
  a(0, 3) = 1;
  a(3, 0) = 1;
  const IntensityMatrix q(a);
  const auto pi = invariant_measure(q, {2, 1});
  CHECK(pi(0) == 0.0);
  CHECK(pi(3) == 0.0);
  CHECK(pi(1) == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
  CHECK(pi(2) == doctest::Approx(10.0 / 11.0).epsilon(1e-14));
  CHECK(stationarity_residual(q, pi) < 1e-15);
  CHECK_THROWS_AS(invariant_measure(q, {}), std::invalid_argument);
  CHECK_THROWS_AS(invariant_measure(q, {7}), BadDimension);
}

TEST_CASE("single state and long-double scalar") {
  const auto pi1 = invariant_measure(IntensityMatrix(Eigen::MatrixXd::Zero(1, 1)));
  CHECK(pi1(0) == 1.0);

  using Q = BasicIntensityMatrix<long double>;
  Q::Matrix a(2, 2);
  a << 0, 1, 2, 0;
  const auto pi = invariant_measure(Q(a));
  CHECK(std::abs(static_cast<double>(pi(0)) - 2.0 / 3.0) < 1e-15);
}

TEST_CASE("irreducibility of the listed matrices") {
  CHECK(is_irreducible(tridiagonal(5, 1.0)));
  CHECK_FALSE(is_irreducible(IntensityMatrix(Eigen::MatrixXd::Zero(2, 2))));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a(1, 2) = 10;  // ud -> du
  a(2, 1) = 1;   // du -> ud
  const IntensityMatrix q(a);
  CHECK(is_irreducible(q, {1, 2}));
  CHECK_FALSE(is_irreducible(q));
}

TEST_CASE("equal-rate path graph has the uniform law") {
  const auto pi = invariant_measure(tridiagonal(5, 1.0));
  for (int i = 0; i < 5; ++i) CHECK(std::abs(pi(i) - 0.2) < 1e-15);
  CHECK(stationarity_residual(tridiagonal(5, 1.0), pi) < 1e-12);
}
