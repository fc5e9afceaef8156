#include "mskmc/model_file.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace mskmc {
namespace {

YAML::Node require(const YAML::Node& root, const std::string& key) {
  const YAML::Node node = root[key];
  if (!node) throw ModelError("model file: missing key '" + key + "'");
  return node;
}

Eigen::MatrixXd read_rows(const YAML::Node& rows, std::size_t n, const std::string& key) {
  if (!rows.IsSequence() || rows.size() != n) {
    throw BadDimension(fmt::format("model file: '{}' must have {} rows", key, n));
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].IsSequence() || rows[i].size() != n) {
      throw BadDimension(fmt::format("model file: row {} of '{}' must have {} entries", i, key, n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].as<double>();
    }
  }
  return a;
}

Eigen::MatrixXd read_matrix(const YAML::Node& root, const std::string& key, std::size_t n) {
  const YAML::Node node = require(root, key);
  if (node.IsSequence()) return read_rows(node, n, key);
  if (node["dense"]) return read_rows(node["dense"], n, key);
  if (const YAML::Node triplets = node["sparse"]) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& t : triplets) {
      if (!t.IsSequence() || t.size() != 3) {
        throw ModelError(fmt::format("model file: '{}' sparse entries are [i, j, rate]", key));
      }
      const auto i = t[0].as<std::size_t>();
      const auto j = t[1].as<std::size_t>();
      if (i >= n || j >= n) {
        throw BadDimension(fmt::format("model file: '{}' entry ({}, {}) out of range", key, i, j));
      }
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += t[2].as<double>();
    }
    return a;
  }
  throw ModelError("model file: '" + key + "' needs a row list, 'dense' or 'sparse'");
}

Preset parse(const YAML::Node& root, const std::string& name) {
  const auto kind = require(root, "kind").as<std::string>();
  const auto epsilon = require(root, "epsilon").as<double>();
  const YAML::Node initial = require(root, "initial");
  if (!initial.IsSequence() || initial.size() != 2) {
    throw ModelError("model file: 'initial' must be a pair [x, z]");
  }

  if (kind == "two-macro") {
    const auto m = require(root, "m").as<std::size_t>();
    auto model = build_two_macro(m, IntensityMatrix(read_matrix(root, "Q0", m), "Q0"),
                                 IntensityMatrix(read_matrix(root, "Q1", m), "Q1"),
                                 read_matrix(root, "C01", m), read_matrix(root, "C10", m), epsilon);
    const auto x = initial[0].as<std::size_t>();
    const auto z = initial[1].as<int>();
    if (x >= m || (z != 0 && z != 1)) throw ModelError("model file: initial state out of range");
    const StateIndex start = std::get<TwoMacroModel>(model.kind()).index(x, z);
    return {name, std::move(model), start};
  }
  if (kind == "ring") {
    const auto m = require(root, "m").as<std::size_t>();
    auto model = build_ring(m, IntensityMatrix(read_matrix(root, "Q", m), "Q"),
                            read_matrix(root, "Cl", m), read_matrix(root, "Cr", m), epsilon);
    const auto x = initial[0].as<std::size_t>();
    if (x >= m) throw ModelError("model file: initial state out of range");
    const StateIndex start = std::get<RingModel>(model.kind()).index(x, initial[1].as<std::int64_t>());
    return {name, std::move(model), start};
  }
  if (kind == "energy") {
    const auto k = require(root, "k").as<unsigned>();
    if (k == 0 || k > 5) throw BadDimension("spins per particle must be in [1, 5]");
    const std::size_t words = std::size_t{1} << k;
    EnergyFunction energy = spin_sum;
    if (const YAML::Node table = root["energy"]) {
      if (!table.IsSequence() || table.size() != words) {
        throw BadDimension(fmt::format("model file: 'energy' must list {} values", words));
      }
      auto values = table.as<std::vector<double>>();
      energy = [values](std::uint64_t w) { return values.at(w); };
    }
    const double tolerance = root["energy_tolerance"] ? root["energy_tolerance"].as<double>() : 0.0;
    auto model = build_energy(k, energy, IntensityMatrix(read_matrix(root, "Q", words), "Q"),
                              read_matrix(root, "C", words * words), epsilon, tolerance);
    const auto x = initial[0].as<std::size_t>();
    const auto z = initial[1].as<std::size_t>();
    if (x >= words || z >= words) throw ModelError("model file: initial state out of range");
    const StateIndex start = std::get<EnergyModel>(model.kind()).index(x, z);
    return {name, std::move(model), start};
  }
  throw ModelError("model file: unknown kind '" + kind + "'");
}

}  // namespace

Preset parse_model_yaml(const std::string& text, const std::string& name) {
  try {
    return parse(YAML::Load(text), name);
  } catch (const YAML::Exception& e) {
    throw ModelError(std::string("model file: ") + e.what());
  }
}

Preset load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model_yaml(buffer.str(), path.string());
}

}  // namespace mskmc
