#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mskmc/intensity_matrix.hpp"

namespace mskmc {

struct JumpEvent {
  double time;
  StateIndex state;

  bool operator==(const JumpEvent&) const = default;
};

/// One simulated path on [0, horizon]. The state is right-continuous: it holds
/// `events[k].state` on [events[k].time, events[k+1].time).
struct Trajectory {
  StateIndex initial_state = 0;
  std::vector<JumpEvent> events;
  double horizon = 0.0;
  /// Set when the path entered a state with zero exit rate before the horizon.
  bool absorbed = false;

  StateIndex final_state() const {
    return events.empty() ? initial_state : events.back().state;
  }

  StateIndex state_at(double t) const {
    StateIndex s = initial_state;
    for (const auto& e : events) {
      if (e.time > t) break;
      s = e.state;
    }
    return s;
  }

  /// Calls f(state, t_begin, t_end) for each constant piece of the path on [0, horizon].
  template <class F>
  void for_each_segment(F&& f) const {
    double t = 0.0;
    StateIndex s = initial_state;
    for (const auto& e : events) {
      f(s, t, e.time);
      t = e.time;
      s = e.state;
    }
    f(s, t, horizon);
  }

  bool operator==(const Trajectory&) const = default;
};

/// Writes `t,state_index,label` rows, starting with the initial state at t = 0.
/// Labels are quoted since "(x,z)" contains a comma.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& path,
                                 const std::function<std::string(StateIndex)>& label) {
  out << "t,state_index,label\n";
  auto row = [&](double t, StateIndex s) {
    fmt::print(out, "{:.17g},{},\"{}\"\n", t, s, label(s));
  };
  row(0.0, path.initial_state);
  for (const auto& e : path.events) row(e.time, e.state);
}

}  // namespace mskmc
