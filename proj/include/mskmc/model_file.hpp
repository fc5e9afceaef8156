#pragma once

#include <filesystem>
#include <string>

#include "mskmc/models.hpp"

namespace mskmc {

/// Reads a YAML model definition:
///
///   kind: two-macro | ring | energy
///   epsilon: 0.001
///   initial: [x, z]      # micro/macro pair; spin words for the energy model
///   m: 5                 # two-macro and ring
///   k: 2                 # energy
///   energy: [0, 1, 1, 2] # energy, optional (default: number of up spins)
///   energy_tolerance: 0  # energy, optional
///
/// plus the matrix blocks of the family (Q0 Q1 C01 C10 | Q Cl Cr | Q C). A
/// block is either a list of rows, or a map with `dense: [[...]]` or
/// `sparse: [[i, j, rate], ...]` (repeated entries add up).
///
/// Construction errors propagate as ModelError subclasses; malformed YAML or
/// missing keys throw ModelError with the key named.
Preset parse_model_yaml(const std::string& text, const std::string& name = "model");
Preset load_model_file(const std::filesystem::path& path);

}  // namespace mskmc
