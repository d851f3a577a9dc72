#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace parasphere {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is a 0-based byte offset into the
/// source, `expected` describes the token set that would have been accepted.
struct SyntaxError : Error {
  SyntaxError(const std::string& what, std::size_t position, std::string expected)
      : Error(what), position(position), expected(std::move(expected)) {}
  std::size_t position;
  std::string expected;
};

/// Identifier that is neither a variable, the imaginary unit, nor a known function.
struct UnknownIdentifier : Error {
  UnknownIdentifier(const std::string& name, std::size_t position)
      : Error("unknown identifier '" + name + "'"), name(name), position(position) {}
  std::string name;
  std::size_t position;
};

/// Variable index outside 1..n.
struct VariableOutOfRange : Error {
  VariableOutOfRange(int index, int arity, std::size_t position)
      : Error("variable z" + std::to_string(index) + " out of range for arity " +
              std::to_string(arity)),
        index(index), arity(arity), position(position) {}
  int index;
  int arity;
  std::size_t position;
};

/// Exponent of '^' is not an integer literal.
struct NonIntegerExponent : Error {
  explicit NonIntegerExponent(std::size_t position)
      : Error("exponent must be an integer literal"), position(position) {}
  std::size_t position;
};

/// Evaluation hit a singular primitive (division by zero, log/sqrt branch point, ...).
struct DomainError : Error {
  DomainError(const std::string& what, std::string subexpression)
      : Error(what + " in '" + subexpression + "'"),
        subexpression(std::move(subexpression)) {}
  std::string subexpression;
};

/// Im(d^2 F) is not invertible at the requested point; no metric quantities exist there.
struct DegenerateMetric : Error {
  DegenerateMetric(double min_sv, double threshold)
      : Error("degenerate point: min singular value of Im(d^2 F) is " +
              std::to_string(min_sv) + " (threshold " + std::to_string(threshold) + ")"),
        min_sv(min_sv), threshold(threshold) {}
  double min_sv;
  double threshold;
};

/// A matrix that must be symmetric came out asymmetric beyond tolerance.
/// Signals an internal assembly bug, not bad user input.
struct AsymmetryError : Error {
  AsymmetryError(double defect, double tolerance)
      : Error("symmetry defect " + std::to_string(defect) + " exceeds tolerance " +
              std::to_string(tolerance)),
        defect(defect), tolerance(tolerance) {}
  double defect;
  double tolerance;
};

/// Newton iteration for the chart inversion failed to converge.
struct NewtonDivergence : Error {
  using Error::Error;
};

/// Operation invoked with an unsupported number of variables.
struct ArityError : Error {
  using Error::Error;
};

/// Every sample of a window lies in the degenerate locus.
struct AllPointsDegenerate : Error {
  using Error::Error;
};

/// Filesystem failure while writing an artifact.
struct IoError : Error {
  using Error::Error;
};

}  // namespace parasphere
