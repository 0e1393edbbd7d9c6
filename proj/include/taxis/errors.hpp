#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace taxis {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shapes or sizes that do not fit together (field vs grid, unknown names).
class StructuralError : public Error {
public:
  using Error::Error;
};

/// Arguments outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A state entry dropped below the clamp threshold after a step.
class PositivityError : public Error {
public:
  PositivityError(std::string field, std::size_t i, std::size_t j, double value)
      : Error("positivity violation in " + field + " at cell (" + std::to_string(i) + ", " +
              std::to_string(j) + "): " + std::to_string(value)),
        field_(std::move(field)), i_(i), j_(j), value_(value) {}

  const std::string& field() const noexcept { return field_; }
  std::size_t i() const noexcept { return i_; }
  std::size_t j() const noexcept { return j_; }
  double value() const noexcept { return value_; }

private:
  std::string field_;
  std::size_t i_;
  std::size_t j_;
  double value_;
};

/// Linear solve did not reach the requested tolerance.
class SolverError : public Error {
public:
  using Error::Error;
};

/// Watchdog trip: NaN or a sup-norm above the blow-up ceiling.
class BlowUpError : public Error {
public:
  using Error::Error;
};

/// Config text that fails to parse or validate. Line is 0 when unknown.
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

} // namespace taxis
