#pragma once

#include <stdexcept>
#include <string>

namespace fastlight {

/// Base class for all library failures. Each subclass maps onto one CLI
/// exit code (see tools/fastlight_cli.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration text. Carries the 1-based line number (0 when the
/// failure is not tied to a line, e.g. a bad --override).
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A parameter or grid violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The integration produced non-finite values or broke norm conservation,
/// or a diagnostic could not be evaluated on the data.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fastlight
