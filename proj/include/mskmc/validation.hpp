#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace mskmc {

/// Expected L1 error (riemann weighting, dx = 0.05, 100 bins) of 10^4 draws
/// taken straight from an exponential limit law with rate in [0.3, 1]:
/// sampling noise plus the right-endpoint discretization bias. Measured
/// harness floors must stay below it; the convergence check allows 3x.
inline constexpr double kL1NoiseFloor = 0.10;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  unsigned jobs = 1;
  /// Scratch space for the determinism check.
  std::filesystem::path work_dir = "mskmc-validate";
  /// Self-test: corrupt the two-macro preset with a negative rate.
  bool inject_negative_rate = false;
  /// Run only these criterion ids (all when empty).
  std::vector<int> only;
};

/// Runs the acceptance criteria in id order, printing one PASS/FAIL line per
/// criterion (with wall time) to `log`.
std::vector<CriterionResult> run_validation(const ValidationOptions& options, std::ostream& log);

/// Deterministic JSON document of the results (no timings).
std::string validation_json(const std::vector<CriterionResult>& results);

}  // namespace mskmc
