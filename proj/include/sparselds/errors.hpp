#pragma once

#include <stdexcept>
#include <string>

namespace sparselds {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent matrix/vector shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// The LP solver stalled or hit its iteration cap.
class SolverError : public Error {
 public:
  using Error::Error;
};

// An exhaustive enumeration would exceed the configured cap.
class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

// A malformed input document. `field` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error("invalid field '" + field + "': " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace sparselds
