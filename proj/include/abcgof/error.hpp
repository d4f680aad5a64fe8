#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace abcgof {

// usage errors are caller mistakes (bad arguments); data errors come from
// malformed inputs or numerically invalid states.
enum class ErrorKind { usage, data };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) {
  return Error(ErrorKind::usage, what);
}

inline Error data_error(const std::string& what) {
  return Error(ErrorKind::data, what);
}

// Raised when a simulator rejects a parameter vector. Carries the draw.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, std::vector<double> theta)
      : Error(ErrorKind::data, what), theta_(std::move(theta)) {}

  const std::vector<double>& theta() const noexcept { return theta_; }

 private:
  std::vector<double> theta_;
};

}  // namespace abcgof
