#pragma once

#include <stdexcept>
#include <string>

namespace logcave {

/// Input data cannot support an estimate (fewer than two distinct points).
class DegenerateSampleError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Iteration budget exhausted with the optimality certificate above tolerance.
class NonConvergenceError : public std::runtime_error {
public:
  NonConvergenceError(std::string msg, double residual)
      : std::runtime_error(std::move(msg)), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// A fit was checked against a sample whose data range it does not cover.
class DomainMismatchError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A claimed mode-constrained fit violates the mode cone at m.
class ModeInfeasibleError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Enumeration oracle: instance too large for exhaustive search.
class OracleTooLargeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Enumeration oracle: no enumerated optimum passed the certificate.
/// Signals a bug in the caller or the kernels, never silently returned.
class OracleInconsistentError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Malformed input file (CSV/JSON); carries a 1-based line number when known.
class InputFormatError : public std::runtime_error {
public:
  explicit InputFormatError(std::string msg, long line = -1)
      : std::runtime_error(std::move(msg)), line_(line) {}
  long line() const noexcept { return line_; }

private:
  long line_;
};

} // namespace logcave
