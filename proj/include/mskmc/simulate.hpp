#pragma once

#include <cstdint>
#include <stdexcept>

#include "mskmc/jump_kernel.hpp"
#include "mskmc/rng_stream.hpp"
#include "mskmc/trajectory.hpp"

namespace mskmc {

inline constexpr std::uint64_t kDefaultMaxEvents = 100'000'000;

struct Jump {
  double waiting_time;
  StateIndex next_state;
};

/// One step of the jump process from `state`: an exponential holding time
/// followed by a target drawn proportionally to the outgoing rates. The
/// holding time is drawn first, then the target.
template <JumpKernel K>
Jump sample_next(const K& kernel, StateIndex state, RngStream& rng) {
  const double q = kernel.exit_rate(state);
  if (!(q > 0.0)) throw AbsorbingState(state);
  const double wait = rng.exponential(q);
  return {wait, kernel.select(state, rng.uniform_open())};
}

inline Jump sample_next(const IntensityMatrix& q, StateIndex state, RngStream& rng) {
  return sample_next(DenseKernel(q), state, rng);
}

/// Simulates the path on [0, horizon]. Entering an absorbing state ends the
/// path with `absorbed` set. Throws EventBudgetExceeded if more than
/// `max_events` jumps would fall inside the horizon.
template <JumpKernel K>
Trajectory simulate(const K& kernel, StateIndex start, double horizon, RngStream& rng,
                    std::uint64_t max_events = kDefaultMaxEvents) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("simulate: horizon must be >= 0");
  Trajectory path;
  path.initial_state = start;
  path.horizon = horizon;
  double t = 0.0;
  StateIndex state = start;
  while (true) {
    const double q = kernel.exit_rate(state);
    if (!(q > 0.0)) {
      path.absorbed = true;
      break;
    }
    const double wait = rng.exponential(q);
    if (t + wait > horizon) break;
    if (path.events.size() >= max_events) throw EventBudgetExceeded(path.events.size());
    t += wait;
    state = kernel.select(state, rng.uniform_open());
    path.events.push_back({t, state});
  }
  return path;
}

inline Trajectory simulate(const IntensityMatrix& q, StateIndex start, double horizon,
                           RngStream& rng, std::uint64_t max_events = kDefaultMaxEvents) {
  return simulate(DenseKernel(q), start, horizon, rng, max_events);
}

struct FirstHit {
  double time;
  StateIndex state;
  std::uint64_t events;
};

/// Runs the path until it first enters a state satisfying `target`, with no
/// time cap. Throws AbsorbingState if trapped first, EventBudgetExceeded if
/// `max_events` jumps pass without a hit.
template <JumpKernel K, class Target>
FirstHit first_hit_time(const K& kernel, StateIndex start, Target&& target, RngStream& rng,
                        std::uint64_t max_events = kDefaultMaxEvents) {
  if (target(start)) throw std::invalid_argument("first_hit_time: start already in target");
  double t = 0.0;
  StateIndex state = start;
  for (std::uint64_t n = 1; n <= max_events; ++n) {
    const double q = kernel.exit_rate(state);
    if (!(q > 0.0)) throw AbsorbingState(state);
    t += rng.exponential(q);
    state = kernel.select(state, rng.uniform_open());
    if (target(state)) return {t, state, n};
  }
  throw EventBudgetExceeded(max_events);
}

}  // namespace mskmc
