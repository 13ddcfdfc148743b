#pragma once

#include <stdexcept>
#include <string>

namespace degenwave {

/// A caller-supplied value violates a documented precondition.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its target (stalled eigensolver,
/// exhausted iteration cap, CFL violation).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace degenwave
