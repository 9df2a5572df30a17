#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hydrolim {

/// Malformed input: shape mismatch, bad parameter, unparsable file.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller broke a documented precondition (e.g. averaging an odd field).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A time integrator produced a non-finite coefficient.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(double time, std::string field)
      : std::runtime_error("non-finite value in field '" + field + "' at t = " + std::to_string(time)),
        time_(time),
        field_(std::move(field)) {}

  double time() const noexcept { return time_; }
  const std::string& field() const noexcept { return field_; }

 private:
  double time_;
  std::string field_;
};

/// Checkpoint could not be decoded.
class LoadError : public std::runtime_error {
 public:
  LoadError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace hydrolim
