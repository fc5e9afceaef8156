#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace mskmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model or matrix violates a structural requirement at construction time.
class ModelError : public Error {
 public:
  using Error::Error;
};

class NegativeRate : public ModelError {
 public:
  NegativeRate(std::string block, std::size_t row, std::size_t col, double value);

  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class BadDimension : public ModelError {
 public:
  using ModelError::ModelError;
};

class NotIrreducible : public ModelError {
 public:
  explicit NotIrreducible(std::string block);

  const std::string& block() const { return block_; }

 private:
  std::string block_;
};

class EnergyNotConserved : public ModelError {
 public:
  EnergyNotConserved(std::string block, std::size_t row, std::size_t col);
};

class InadmissibleEnergy : public ModelError {
 public:
  explicit InadmissibleEnergy(double total_energy);
};

/// The process reached a state with zero exit rate.
class AbsorbingState : public Error {
 public:
  explicit AbsorbingState(std::uint64_t state);

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// The per-path event budget ran out before the stopping condition was met.
class EventBudgetExceeded : public Error {
 public:
  explicit EventBudgetExceeded(std::uint64_t events);

  std::uint64_t events() const { return events_; }

 private:
  std::uint64_t events_;
};

class TooFewSamples : public Error {
 public:
  explicit TooFewSamples(std::size_t n);
};

// Inline so header-only users (stationary, simulate) need no link dependency.

inline NegativeRate::NegativeRate(std::string block, std::size_t row, std::size_t col,
                                  double value)
    : ModelError("NegativeRate: " + block + "[" + std::to_string(row) + "][" +
                 std::to_string(col) + "] = " + std::to_string(value)),
      row_(row),
      col_(col) {}

inline NotIrreducible::NotIrreducible(std::string block)
    : ModelError("NotIrreducible: " + block), block_(std::move(block)) {}

inline EnergyNotConserved::EnergyNotConserved(std::string block, std::size_t row,
                                              std::size_t col)
    : ModelError("EnergyNotConserved: " + block + "[" + std::to_string(row) + "][" +
                 std::to_string(col) + "]") {}

inline InadmissibleEnergy::InadmissibleEnergy(double total_energy)
    : ModelError("InadmissibleEnergy: no particle-level split for total energy " +
                 std::to_string(total_energy)) {}

inline AbsorbingState::AbsorbingState(std::uint64_t state)
    : Error("AbsorbingState: state " + std::to_string(state) + " has zero exit rate"),
      state_(state) {}

inline EventBudgetExceeded::EventBudgetExceeded(std::uint64_t events)
    : Error("EventBudgetExceeded after " + std::to_string(events) + " events"),
      events_(events) {}

inline TooFewSamples::TooFewSamples(std::size_t n)
    : Error("TooFewSamples: need at least 2, got " + std::to_string(n)) {}

}  // namespace mskmc
