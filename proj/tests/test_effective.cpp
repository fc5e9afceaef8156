#include <doctest.h>

#include <random>

#include "mskmc/effective.hpp"
#include "mskmc/errors.hpp"

using namespace mskmc;

namespace {

// Stationary law by power iteration of the uniformized chain.
Eigen::VectorXd oracle_pi(const Eigen::MatrixXd& rates) {
  Eigen::MatrixXd g = rates;
  g.diagonal().setZero();
  g.diagonal() -= g.rowwise().sum().eval();
  const double lambda = 1.1 * (-g.diagonal().minCoeff());
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(g.rows(), g.cols()) + g / lambda;
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Constant(g.rows(), 1.0 / double(g.rows()));
  for (int i = 0; i < 20000; ++i) v = v * p;
  return v.transpose() / v.sum();
}

}  // namespace

TEST_CASE("two-macro preset: lambda = 2c/m") {
  for (std::size_t m : {2u, 3u, 5u, 7u, 20u}) {
    for (double c : {0.5, 1.0, 3.0}) {
      const auto model = build_reference_two_macro(m, 1.0, c, 1.0);
      const auto r = derive_two_macro(std::get<TwoMacroModel>(model.kind()));
      CHECK(std::abs(r.lambda0 - 2.0 * c / double(m)) < 1e-12);
      CHECK(std::abs(r.lambda1 - 2.0 * c / double(m)) < 1e-12);
      CHECK(std::abs(r.pi0.sum() - 1.0) < 1e-14);
    }
  }
}

TEST_CASE("two-macro: averaged coupling row sums on random blocks") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 2 + trial % 4;
    const auto n = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd q0 = Eigen::MatrixXd::Zero(n, n), q1 = q0, c01 = q0, c10 = q0;
    for (Eigen::Index i = 0; i < n; ++i) {
      q0(i, (i + 1) % n) = u(gen);
      q1(i, (i + n - 1) % n) = u(gen);
      q0((i + 2) % n, i) += u(gen);
      c01(i, (i * 3) % n) = u(gen);
      c10(i, 0) = u(gen);
    }
    const auto model = build_two_macro(m, IntensityMatrix(q0), IntensityMatrix(q1), c01, c10, 1.0);
    const auto r = derive_two_macro(std::get<TwoMacroModel>(model.kind()));
    CHECK(std::abs(r.lambda0 - oracle_pi(q0).dot(c01.rowwise().sum())) < 1e-9);
    CHECK(std::abs(r.lambda1 - oracle_pi(q1).dot(c10.rowwise().sum())) < 1e-9);
  }
}

TEST_CASE("ring preset: lambda_l = c_l/m, lambda_r = c_r/m") {
  const auto r = derive_ring(std::get<RingModel>(make_preset("ring-s3.2", {}, 1.0).model.kind()));
  CHECK(std::abs(r.lambda_l - 0.2) < 1e-12);
  CHECK(std::abs(r.lambda_r - 0.4) < 1e-12);
  PresetParams params;
  params.m = 8;
  params.c_l = 3;
  params.c_r = 0.5;
  const auto r8 = derive_ring(std::get<RingModel>(make_preset("ring-s3.2", params, 1.0).model.kind()));
  CHECK(std::abs(r8.lambda_l - 3.0 / 8.0) < 1e-12);
  CHECK(std::abs(r8.lambda_r - 0.5 / 8.0) < 1e-12);
}

TEST_CASE("energy preset at E = 1 by hand") {
  // Fast law on {ud, du}: pi(ud) = 1/11, pi(du) = 10/11. From (x, dd) with
  // E(x) = 1 there are two exchange targets, at rate 1 when x = ud and 0.2
  // otherwise: B(1,0) = 2/11 + 0.4 * 10/11 = 6/11. From (dd, z) every exchange
  // is at 0.2: B(0,1) = 0.4.
  const Preset p = make_preset("energy-s4.3", {}, 1.0);
  const auto r = derive_energy(std::get<EnergyModel>(p.model.kind()), 1.0);
  REQUIRE(r.levels == std::vector<double>{0, 1});
  CHECK(std::abs(r.rates(1, 0) - 6.0 / 11.0) < 1e-12);
  CHECK(std::abs(r.rates(0, 1) - 0.4) < 1e-12);
  CHECK(r.rates(0, 0) == 0.0);
  const auto& pi1 = r.level_measures[1];
  CHECK(std::abs(pi1(1) - 1.0 / 11.0) < 1e-14);
  CHECK(std::abs(pi1(2) - 10.0 / 11.0) < 1e-14);
  CHECK(std::abs(limit_exit_rate(r, 1.0) - 6.0 / 11.0) < 1e-12);
}

TEST_CASE("energy preset: other totals") {
  const Preset p = make_preset("energy-s4.3", {}, 1.0);
  const auto& e = std::get<EnergyModel>(p.model.kind());
  const auto r0 = derive_energy(e, 0.0);
  CHECK(r0.levels == std::vector<double>{0});
  CHECK(r0.rates.rows() == 1);
  CHECK(r0.rates(0, 0) == 0.0);
  CHECK(limit_exit_rate(r0, 0.0) == 0.0);

  // E = 2, from e = 1: the first particle sits at its fast law and each
  // direction has one target, at rate 1 out of ud and 0.2 out of du. From
  // (dd, uu) there are four targets at level 1 and one at level 2, all at 0.2.
  const auto r2 = derive_energy(e, 2.0);
  REQUIRE(r2.levels == std::vector<double>{0, 1, 2});
  CHECK(std::abs(r2.rates(1, 0) - 3.0 / 11.0) < 1e-12);
  CHECK(std::abs(r2.rates(1, 2) - 3.0 / 11.0) < 1e-12);
  CHECK(std::abs(r2.rates(0, 1) - 0.8) < 1e-12);
  CHECK(std::abs(r2.rates(0, 2) - 0.2) < 1e-12);

  CHECK_THROWS_AS(derive_energy(e, 5.0), InadmissibleEnergy);
  CHECK_THROWS_AS(derive_energy(e, 0.5), InadmissibleEnergy);
  CHECK_THROWS_AS(derive(p.model), std::invalid_argument);
}

TEST_CASE("limit processes") {
  const auto two = derive(make_preset("two-macro-s2.3", {}, 1.0).model);
  const LimitProcess lp = limit_process(two);
  REQUIRE(lp.matrix);
  CHECK(std::abs((*lp.matrix)(0, 1) - 0.4) < 1e-12);
  CHECK(std::abs((*lp.matrix)(1, 0) - 0.4) < 1e-12);
  CHECK(limit_state(two, 1.0) == 1);

  const auto ring = derive(make_preset("ring-s3.2", {}, 1.0).model);
  const LimitProcess rp = limit_process(ring);
  CHECK_FALSE(rp.matrix);
  const auto& lattice = std::get<LatticeProcess>(rp.process).kernel;
  CHECK(lattice.micro_states() == 1);
  CHECK(std::abs(lattice.exit_rate(lattice.encode({0, 4})) - 0.6) < 1e-12);
  CHECK(std::abs(limit_exit_rate(ring, -2.0) - 0.6) < 1e-12);

  const auto energy = derive(make_preset("energy-s4.3", {}, 1.0).model, 1.0);
  const LimitProcess ep = limit_process(energy);
  REQUIRE(ep.matrix);
  CHECK(std::abs((*ep.matrix)(1, 0) - 6.0 / 11.0) < 1e-12);
  CHECK(limit_state(energy, 0.0) == 0);
  CHECK_THROWS_AS(limit_state(energy, 2.0), std::invalid_argument);
}

TEST_CASE("report lists rates at full precision") {
  const auto report = format_report(derive(make_preset("ring-s3.2", {}, 1.0).model));
  CHECK(report.find("lambda_l = 0.20000000000000001") != std::string::npos);
  CHECK(report.find("lambda_r = 0.40000000000000002") != std::string::npos);
}

TEST_CASE("listed effective-rate cases") {
  // constant coupling row sum kappa gives lambda0 = kappa whatever Q0 is
  Eigen::MatrixXd q0(3, 3);
  q0 << 0, 5, 0,
        0.1, 0, 2,
        3, 0, 0;
  Eigen::MatrixXd c01(3, 3);
  c01 << 0.2, 0.3, 0.25,
         0.75, 0, 0,
         0, 0.5, 0.25;
  const IntensityMatrix q1 = tridiagonal(3, 1.0);
  const auto model = build_two_macro(3, IntensityMatrix(q0), q1, c01, c01, 1.0);
  CHECK(std::abs(derive_two_macro(std::get<TwoMacroModel>(model.kind())).lambda0 - 0.75) < 1e-12);

  const auto m3 = build_reference_two_macro(3, 1.0, 1.0, 1.0);
  CHECK(std::abs(derive_two_macro(std::get<TwoMacroModel>(m3.kind())).lambda0 - 2.0 / 3.0) < 1e-12);

  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(5, 5);
  Eigen::MatrixXd cr = zero;
  cr(1, 3) = 1.0;
  cr(4, 0) = 1.0;
  const auto ring = build_ring(5, tridiagonal(5, 1.0), zero, cr, 1.0);
  const auto r = derive_ring(std::get<RingModel>(ring.kind()));
  CHECK(r.lambda_l == 0.0);
  CHECK(std::abs(r.lambda_r - 0.4) < 1e-12);
}

TEST_CASE("limit exit laws") {
  PresetParams params;
  params.m = 20;
  const auto two = derive(make_preset("two-macro-s2.3", params, 1.0).model);
  CHECK(std::abs(limit_exit_rate(two, 0.0) - 0.1) < 1e-12);
  CHECK(std::abs(limit_exit_rate(two, 1.0) - 0.1) < 1e-12);

  const auto ring = std::get<RingRates>(derive(make_preset("ring-s3.2", {}, 1.0).model));
  CHECK(std::abs(ring.lambda_r / (ring.lambda_l + ring.lambda_r) - 2.0 / 3.0) < 1e-12);

  const auto energy = derive(make_preset("energy-s4.3", {}, 1.0).model, 1.0);
  CHECK(std::abs(limit_exit_rate(energy, 1.0) - 6.0 / 11.0) < 1e-12);
}
