#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fpquad {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A winding-number test point lies (numerically) on the contour.
class ContourTooClose : public Error {
 public:
  using Error::Error;
};

/// The contour or integrand violates a hypothesis of the loop-integral
/// representation (winding, symmetry, enclosed singularity).
class PreflightError : public Error {
 public:
  enum class Check { winding, symmetry, singularity, analyticity };

  PreflightError(Check check, std::string what) : Error(std::move(what)), check_(check) {}

  [[nodiscard]] Check check() const noexcept { return check_; }

 private:
  Check check_;
};

/// The log kernel was requested on (or next to) the cut [0,1].
class BranchCutError : public Error {
 public:
  using Error::Error;
};

class MissingDerivative : public Error {
 public:
  using Error::Error;
};

/// Non-finite integrand value at a quadrature node.
class EvaluationError : public Error {
 public:
  EvaluationError(std::size_t node, std::string what) : Error(std::move(what)), node_(node) {}

  [[nodiscard]] std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

class SymmetryRequirement : public Error {
 public:
  using Error::Error;
};

/// Adaptive refinement hit n_max. Carries the best iterate.
class NonConvergence : public Error {
 public:
  NonConvergence(std::string what, std::complex<double> best, double err_bound, int n_samples)
      : Error(std::move(what)), best_(best), err_bound_(err_bound), n_samples_(n_samples) {}

  [[nodiscard]] std::complex<double> best_estimate() const noexcept { return best_; }
  [[nodiscard]] double error_bound() const noexcept { return err_bound_; }
  [[nodiscard]] int n_samples() const noexcept { return n_samples_; }

 private:
  std::complex<double> best_;
  double err_bound_;
  int n_samples_;
};

class InnerQuadratureError : public Error {
 public:
  using Error::Error;
};

class OracleUnstable : public Error {
 public:
  OracleUnstable(std::string what, std::vector<double> sequence)
      : Error(std::move(what)), sequence_(std::move(sequence)) {}

  /// F(eps_j) over the configured eps sequence.
  [[nodiscard]] const std::vector<double>& sequence() const noexcept { return sequence_; }

 private:
  std::vector<double> sequence_;
};

/// The strip |Im w| <= d' maps onto [0,1] or a singularity of f.
class AnalyticityViolated : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Syntax error in an integrand expression.
class ParseError : public Error {
 public:
  ParseError(std::string what, std::size_t offset, std::vector<std::string> expected)
      : Error(std::move(what)), offset_(offset), expected_(std::move(expected)) {}

  /// Byte offset into the source where parsing failed.
  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
  [[nodiscard]] const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// An expression produced a non-finite value.
class NonFiniteResult : public Error {
 public:
  NonFiniteResult(std::string what, std::string subexpression)
      : Error(std::move(what)), subexpression_(std::move(subexpression)) {}

  [[nodiscard]] const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

}  // namespace fpquad
