#pragma once

#include <stdexcept>
#include <string>

namespace cvlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, std::string location = {})
      : std::runtime_error(location.empty() ? what : location + ": " + what),
        location_(std::move(location)) {}

  /// Short machine-readable class name, e.g. "invariant-violation".
  virtual const char* kind() const noexcept { return "error"; }

  /// Where the error was detected (file line/column or field path); may be empty.
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

/// A domain value was constructed or combined in violation of its invariants.
class InvariantViolation : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invariant-violation"; }
};

/// Integer millimeter arithmetic left the representable range.
class OverflowError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "overflow"; }
};

/// A tick outside the horizon of a behavior was queried.
class HorizonError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "horizon"; }
};

/// A check or directive named a component that does not exist.
class MissingComponent : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "missing-component"; }
};

/// The grid encoding would exceed the configured cell budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "budget-exceeded"; }
};

/// Malformed scenario text.
class SyntaxError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "syntax-error"; }
};

/// A scenario cross-reference (site, behavior, script, component) does not resolve.
class UnresolvedReference : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unresolved-reference"; }
};

}  // namespace cvlab
