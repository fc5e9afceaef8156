#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "mskmc/errors.hpp"
#include "mskmc/intensity_matrix.hpp"
#include "mskmc/jump_kernel.hpp"
#include "mskmc/models.hpp"
#include "mskmc/rng_stream.hpp"
#include "mskmc/simulate.hpp"
#include "mskmc/trajectory.hpp"

using namespace mskmc;

namespace {

IntensityMatrix three_state() {
  Eigen::MatrixXd a(3, 3);
  a << 0, 1, 3,
       2, 0, 2,
       0.5, 0.5, 0;
  return IntensityMatrix(a);
}

}  // namespace

TEST_CASE("intensity matrix validates its entries") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(3, 3);
  a(1, 2) = -0.5;
  try {
    IntensityMatrix q(a, "Q0");
    FAIL("expected NegativeRate");
  } catch (const NegativeRate& e) {
    CHECK(e.row() == 1);
    CHECK(e.col() == 2);
    CHECK(std::string(e.what()).find("Q0") != std::string::npos);
  }
  CHECK_THROWS_AS(IntensityMatrix(Eigen::MatrixXd::Ones(2, 3)), BadDimension);
  a(1, 2) = std::nan("");
  CHECK_THROWS_AS(IntensityMatrix{a}, NegativeRate);
}

TEST_CASE("diagonal entries are ignored and the generator has zero row sums") {
  Eigen::MatrixXd a(2, 2);
  a << -7, 2,
       3, 5;
  const IntensityMatrix q(a);
  CHECK(q(0, 0) == 0.0);
  CHECK(q(1, 1) == 0.0);
  CHECK(exit_rate(q, 0) == 2.0);
  CHECK(exit_rate(q, 1) == 3.0);
  const Eigen::MatrixXd g = q.generator();
  CHECK(g(0, 0) == -2.0);
  CHECK(g.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
  CHECK(q.scaled(2.0)(1, 0) == 6.0);
}

TEST_CASE("tridiagonal nearest-neighbour matrix") {
  const IntensityMatrix q = tridiagonal(4, 1.5);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(q(i, j) == (std::abs(i - j) == 1 ? 1.5 : 0.0));
  }
}

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 16; ++i) {
    va.push_back(a.next_u64());
    vb.push_back(b.next_u64());
    vc.push_back(c.next_u64());
    vd.push_back(d.next_u64());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
}

TEST_CASE("uniform draws lie strictly inside (0,1) and exponentials have the right mean") {
  RngStream rng(1, 0);
  double sum = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += rng.exponential(4.0);
  }
  // mean 0.25, standard error 0.25 / sqrt(n)
  CHECK(std::abs(sum / n - 0.25) < 5 * 0.25 / std::sqrt(double(n)));
}

TEST_CASE("embedded jump chain and holding times match the rates") {
  const IntensityMatrix q = three_state();
  RngStream rng(5, 0);
  constexpr int n = 100000;
  std::map<StateIndex, int> counts;
  double hold = 0.0;
  for (int i = 0; i < n; ++i) {
    const Jump j = sample_next(q, 0, rng);
    ++counts[j.next_state];
    hold += j.waiting_time;
  }
  CHECK(counts[0] == 0);
  const double p1 = counts[1] / double(n);
  CHECK(std::abs(p1 - 0.25) < 5 * std::sqrt(0.25 * 0.75 / n));
  CHECK(std::abs(hold / n - 0.25) < 5 * 0.25 / std::sqrt(double(n)));
}

TEST_CASE("kernel selection partitions the unit interval by cumulative rates") {
  const DenseKernel k(three_state());
  CHECK(k.exit_rate(0) == 4.0);
  CHECK(k.select(0, 1e-12) == 1);
  CHECK(k.select(0, 0.2499) == 1);
  CHECK(k.select(0, 0.2501) == 2);
  CHECK(k.select(0, 1.0) == 2);
  CHECK(k.select(2, 0.49) == 0);
  CHECK(k.select(2, 0.51) == 1);
}

TEST_CASE("lattice kernel encoding is a bijection") {
  for (std::int64_t z = -50; z <= 50; ++z) CHECK(LatticeKernel::unzigzag(LatticeKernel::zigzag(z)) == z);
  std::set<std::uint64_t> seen;
  for (std::int64_t z = -20; z <= 20; ++z) seen.insert(LatticeKernel::zigzag(z));
  CHECK(seen.size() == 41);
  CHECK(*seen.rbegin() == 40);

  Eigen::MatrixXd within = tridiagonal(3, 1.0).rates();
  Eigen::MatrixXd left = Eigen::MatrixXd::Zero(3, 3), right = Eigen::MatrixXd::Zero(3, 3);
  left(0, 2) = 1.0;
  right(2, 0) = 2.0;
  const LatticeKernel k(within, left, right);
  for (std::int64_t z : {-3, 0, 5}) {
    for (std::uint64_t x = 0; x < 3; ++x) CHECK(k.decode(k.encode({x, z})) == LatticeState{x, z});
  }
  CHECK(k.exit_rate(k.encode({0, -7})) == 2.0);
  CHECK(k.exit_rate(k.encode({2, 4})) == 3.0);
  // from (2, 4): within to x=1 on [0, 1/3), right to (0, 5) above
  CHECK(k.decode(k.select(k.encode({2, 4}), 0.9)) == LatticeState{0, 5});
  CHECK(k.decode(k.select(k.encode({0, 0}), 0.9)) == LatticeState{2, -1});
}

TEST_CASE("simulate: horizon zero, determinism and budget") {
  const IntensityMatrix q = three_state();
  RngStream r0(3, 0);
  const Trajectory empty = simulate(q, 1, 0.0, r0);
  CHECK(empty.events.empty());
  CHECK(empty.final_state() == 1);

  RngStream a(3, 1), b(3, 1);
  const Trajectory ta = simulate(q, 0, 20.0, a);
  const Trajectory tb = simulate(q, 0, 20.0, b);
  CHECK(ta == tb);
  REQUIRE(ta.events.size() > 10);
  for (std::size_t i = 1; i < ta.events.size(); ++i) {
    CHECK(ta.events[i].time > ta.events[i - 1].time);
    CHECK(ta.events[i].state != ta.events[i - 1].state);
  }
  CHECK(ta.events.back().time <= 20.0);
  CHECK(ta.state_at(0.0) == 0);
  CHECK(ta.state_at(ta.events[2].time) == ta.events[2].state);

  double covered = 0.0;
  ta.for_each_segment([&](StateIndex, double t0, double t1) { covered += t1 - t0; });
  CHECK(covered == doctest::Approx(20.0));

  RngStream c(3, 2);
  CHECK_THROWS_AS(simulate(q, 0, 1e6, c, 50), EventBudgetExceeded);
}

TEST_CASE("absorbing states stop a path and fail a single step") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 1) = 1.0;
  const IntensityMatrix q(a);
  RngStream rng(9, 0);
  const Trajectory t = simulate(q, 0, 100.0, rng);
  CHECK(t.absorbed);
  CHECK(t.final_state() == 1);
  CHECK(t.events.size() == 1);
  CHECK_THROWS_AS(sample_next(q, 1, rng), AbsorbingState);
}

TEST_CASE("first hitting time of a two-state chain is exponential") {
  Eigen::MatrixXd a(2, 2);
  a << 0, 0.8,
       3, 0;
  const DenseKernel k{IntensityMatrix(a)};
  constexpr int n = 50000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream rng(11, static_cast<std::uint64_t>(i));
    const FirstHit hit = first_hit_time(k, 0, [](StateIndex s) { return s == 1; }, rng);
    CHECK(hit.state == 1);
    sum += hit.time;
  }
  CHECK(std::abs(sum / n - 1.25) < 5 * 1.25 / std::sqrt(double(n)));
  RngStream rng(11, 0);
  CHECK_THROWS_AS(first_hit_time(k, 1, [](StateIndex s) { return s == 1; }, rng), std::invalid_argument);
}

TEST_CASE("trajectory csv layout") {
  Trajectory t;
  t.initial_state = 3;
  t.horizon = 2.0;
  t.events = {{0.5, 1}, {1.25, 0}};
  std::ostringstream out;
  write_trajectory_csv(out, t, [](StateIndex s) { return "(" + std::to_string(s) + ",0)"; });
  CHECK(out.str() == "t,state_index,label\n0,3,\"(3,0)\"\n0.5,1,\"(1,0)\"\n1.25,0,\"(0,0)\"\n");
}

TEST_CASE("exit rates of listed states") {
  CHECK(exit_rate(tridiagonal(5, 1.0), 2) == 2.0);
  CHECK(exit_rate(IntensityMatrix(Eigen::MatrixXd::Zero(3, 3)), 1) == 0.0);
  // eps^-1 q to the neighbour plus c across the barrier
  const auto model = build_reference_two_macro(5, 1.0, 1.0, 1e-3);
  CHECK(exit_rate(model.generator(), 0) == doctest::Approx(1001.0).epsilon(1e-15));
}

TEST_CASE("forced jump target and its holding time") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 1) = 0.7;
  const IntensityMatrix q(a);
  RngStream rng(21, 0);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Jump j = sample_next(q, 0, rng);
    REQUIRE(j.next_state == 1);
    sum += j.waiting_time;
  }
  CHECK(std::abs(sum / 1e4 - 1 / 0.7) < 3 * (1 / 0.7) / 100);
}

TEST_CASE("row rates (2, 1, 1) send half the jumps to state 1") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a(0, 1) = 2;
  a(0, 2) = 1;
  a(0, 3) = 1;
  const IntensityMatrix q(a);
  RngStream rng(22, 0);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) hits += sample_next(q, 0, rng).next_state == 1;
  CHECK(std::abs(hits / 1e4 - 0.5) < 3 * std::sqrt(0.25 / 1e4));
}

TEST_CASE("absorbing start gives an empty path with the flag set") {
  const IntensityMatrix q(Eigen::MatrixXd::Zero(2, 2));
  RngStream rng(1, 0);
  const Trajectory t = simulate(q, 1, 5.0, rng);
  CHECK(t.events.empty());
  CHECK(t.absorbed);
}

TEST_CASE("symmetric two-state chain spends half its time in each state") {
  const IntensityMatrix q = tridiagonal(2, 1.0);
  RngStream rng(23, 0);
  const Trajectory t = simulate(q, 0, 1e4, rng);
  double in_zero = 0.0;
  t.for_each_segment([&](StateIndex s, double t0, double t1) { in_zero += s == 0 ? t1 - t0 : 0.0; });
  CHECK(std::abs(in_zero / 1e4 - 0.5) < 0.05);
}

TEST_CASE("first hitting times: single clock and the multiscale presets") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 1) = 0.1;
  const DenseKernel two{IntensityMatrix(a)};
  double sum = 0.0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    RngStream rng(24, i);
    sum += first_hit_time(two, 0, [](StateIndex s) { return s == 1; }, rng).time;
  }
  CHECK(std::abs(sum / 1e4 - 10.0) < 3 * 10.0 / 100);

  auto mean_hit = [](const MultiscaleModel& model, StateIndex start, auto target, std::uint64_t seed) {
    const DenseKernel k(model.generator());
    std::vector<double> times;
    for (std::uint64_t i = 0; i < 4000; ++i) {
      RngStream rng(seed, i);
      times.push_back(first_hit_time(k, start, target, rng).time);
    }
    double mean = 0.0, var = 0.0;
    for (double t : times) mean += t;
    mean /= double(times.size());
    for (double t : times) var += (t - mean) * (t - mean);
    return std::pair{mean, std::sqrt(var / double(times.size() - 1) / double(times.size()))};
  };
  const auto two_macro = build_reference_two_macro(5, 1.0, 1.0, 1e-3);
  const auto [m1, se1] = mean_hit(two_macro, 0, [](StateIndex s) { return s >= 5; }, 25);
  CHECK(std::abs(m1 - 2.5) < 4 * se1);

  const auto energy = build_reference_energy(1e-3);
  const auto& e = std::get<EnergyModel>(energy.kind());
  const StateIndex start = e.index(spin_word_from_label(2), spin_word_from_label(1));
  const auto [m2, se2] = mean_hit(energy, start, [&](StateIndex s) { return e.energy[e.first(s)] != 1.0; }, 26);
  CHECK(std::abs(m2 - 11.0 / 6.0) < 4 * se2);
}
