#pragma once

#include <stdexcept>
#include <string>

namespace eqppo {

// Error categories. The CLI maps each to a distinct exit code.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite values appeared in a network or simulation state.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::string where)
      : std::runtime_error(what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// A leg inverse-kinematics target outside the reachable workspace.
class WorkspaceError : public std::runtime_error {
 public:
  WorkspaceError(const std::string& what, double distance_to_boundary)
      : std::runtime_error(what), distance_(distance_to_boundary) {}
  double distance_to_boundary() const noexcept { return distance_; }

 private:
  double distance_;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eqppo
