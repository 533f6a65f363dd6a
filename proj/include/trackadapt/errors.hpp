#pragma once

#include <stdexcept>
#include <string>

namespace trackadapt {

// Invalid numeric argument (negative size, NaN coordinate, degenerate ground truth).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation called in the wrong lifecycle state (uninitialized filter, wrong EDRM mode).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Numerical breakdown: singular matrices, NaN losses.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value or schema violation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when one applies (0 otherwise).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace trackadapt
