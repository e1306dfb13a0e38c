#pragma once

#include <stdexcept>
#include <string>

namespace bbz {

// Argument outside the mathematical domain of a map (alpha <= 0, h out of range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Grid or solver settings that cannot produce a meaningful result.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical kernel failed (non-convergence, singular system, lost solvability).
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bbz
