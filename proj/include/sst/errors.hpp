#pragma once

#include <stdexcept>
#include <string>

namespace sst {

// Shape or size mismatch between operands.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// NaN or Inf where a finite value is required.
struct NonFiniteError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Effective rank below what the operation needs.
struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative routine exhausted its iteration budget.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad experiment configuration (parse or validation).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failure, annotated with the offending path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A statistics window selected no records (e.g. burn-in >= trace length).
struct EmptyWindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sst
