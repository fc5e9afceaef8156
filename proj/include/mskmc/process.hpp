#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "mskmc/jump_kernel.hpp"

namespace mskmc {

/// Finite jump process with a slow-observable value and a label per state.
struct FiniteProcess {
  DenseKernel kernel;
  std::vector<double> slow;
  std::vector<std::string> labels;

  auto slow_fn() const {
    return [this](StateIndex s) { return slow[s]; };
  }
};

/// Lattice process on M x Z; the slow observable is the macro label z.
struct LatticeProcess {
  LatticeKernel kernel;

  auto slow_fn() const {
    return [this](StateIndex s) { return static_cast<double>(kernel.decode(s).z); };
  }
};

using JumpProcess = std::variant<FiniteProcess, LatticeProcess>;

/// Calls f(kernel, slow) with the concrete kernel type, so event loops stay
/// monomorphic.
template <class F>
decltype(auto) visit_process(const JumpProcess& process, F&& f) {
  return std::visit([&](const auto& p) -> decltype(auto) { return f(p.kernel, p.slow_fn()); },
                    process);
}

inline double slow_value(const JumpProcess& process, StateIndex state) {
  return visit_process(process, [&](const auto&, auto slow) { return slow(state); });
}

inline std::string state_label(const JumpProcess& process, StateIndex state) {
  if (const auto* finite = std::get_if<FiniteProcess>(&process)) {
    return finite->labels.at(state);
  }
  const auto s = std::get<LatticeProcess>(process).kernel.decode(state);
  return fmt::format("({},{})", s.x, s.z);
}

}  // namespace mskmc
