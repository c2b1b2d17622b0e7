#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace llg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fields or trajectories that do not live on the same grid / time grid.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Pointwise normalization of a field with a vanishing node.
class DegenerateFieldError : public Error {
 public:
  using Error::Error;
};

/// Raised by the time steppers when a field entry leaves the trusted range.
class BlowupError : public Error {
 public:
  BlowupError(const std::string& what, std::size_t step) : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Explicit stepping requested with a time step above the stability cap.
class StabilityError : public Error {
 public:
  using Error::Error;
};

class LineSearchError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration value; `key()` names the offending "section.key".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Malformed snapshot or trajectory files.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace llg
