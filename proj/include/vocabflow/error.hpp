#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vocabflow {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed sentence text or target spec. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
      : Error(line == 0 ? message
                        : message + " (line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ")"),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

/// The requested map cannot be certified as a flow by the available closed forms.
class NotAFlowError : public Error {
public:
  using Error::Error;
};

class SingularMatrixError : public Error {
public:
  using Error::Error;
};

/// An iteration or refinement cap was hit.
class ResourceError : public Error {
public:
  using Error::Error;
};

class StepUnderflowError : public ResourceError {
public:
  using ResourceError::ResourceError;
};

/// A split step violates max(1/alpha, alpha) |a w_j| < 1.
class InfeasibleStepError : public Error {
public:
  using Error::Error;
};

/// A compiled artifact failed its own validation grid.
class ValidationError : public Error {
public:
  using Error::Error;
};

}  // namespace vocabflow
