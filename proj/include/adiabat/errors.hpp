#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adiabat {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Expression text rejected by the parser; `offset` is the byte position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Domain violation while evaluating an expression (ln of a non-positive
/// value, fractional power of a negative base, division by zero, overflow).
class EvalError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the domain rectangle, or the rectangle itself is
/// degenerate.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid model configuration (file contents, registry definitions).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure inside the reconstruction pipeline. `step()` names the
/// stage for diagnostics: "inversion", "quadrature", "graph" or "sign-scan".
class NumericError : public Error {
 public:
  NumericError(const std::string& what, const char* step)
      : Error(what), step_(step) {}
  const char* step() const { return step_; }

 private:
  const char* step_;
};

/// Bracketed root solving failed (no bracket, or target unattainable).
class InversionError : public NumericError {
 public:
  explicit InversionError(const std::string& what)
      : NumericError(what, "inversion") {}
};

/// Adaptive quadrature could not reach its tolerance.
class QuadratureError : public NumericError {
 public:
  explicit QuadratureError(const std::string& what)
      : NumericError(what, "quadrature") {}
};

/// The transformed adiabat is not the graph of a function, or has too few
/// distinct samples.
class GraphError : public NumericError {
 public:
  explicit GraphError(const std::string& what)
      : NumericError(what, "graph") {}
};

/// Curve sampling failure (no intersection with the domain, ambiguous branch).
class CurveError : public NumericError {
 public:
  explicit CurveError(const std::string& what)
      : NumericError(what, "graph") {}
};

/// Evaluation refused outside the valid band of a reconstruction.
class RangeError : public NumericError {
 public:
  explicit RangeError(const std::string& what)
      : NumericError(what, "graph") {}
};

/// The partial derivative used for inversion vanishes or changes sign on the
/// domain scan grid.
class SignScanError : public NumericError {
 public:
  explicit SignScanError(const std::string& what)
      : NumericError(what, "sign-scan") {}
};

}  // namespace adiabat
