#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltcm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Duplicate, out-of-range, empty or too many collocation nodes.
class InvalidNodesError : public Error {
 public:
  using Error::Error;
};

/// Shape or domain violations of arguments (non-square matrices, h <= 0, ...).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// A truncated power series did not reach its tolerance, or its argument
/// exceeds the supported radius.
class SeriesDivergenceError : public Error {
 public:
  using Error::Error;
};

/// The spectral path was requested for a matrix that is not symmetric PSD.
class AsymmetricMatrixError : public Error {
 public:
  using Error::Error;
};

/// A scalar kernel was called outside the argument range where it is accurate.
class KernelDomainError : public Error {
 public:
  using Error::Error;
};

/// h^2 L max|int l_j(c_i z)(1-z)| >= 1 while the contraction guard is enabled.
class ContractionGuardError : public Error {
 public:
  using Error::Error;
};

/// Stage fixed-point iteration did not converge.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, std::size_t step_index, double residual, int iterations)
      : Error(what), step_index_(step_index), residual_(residual), iterations_(iterations) {}

  std::size_t step_index() const noexcept { return step_index_; }
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  std::size_t step_index_;
  double residual_;
  int iterations_;
};

/// The reference solver's step-doubling self-check failed.
class OracleUnreliableError : public Error {
 public:
  OracleUnreliableError(const std::string& what, double endpoint_change)
      : Error(what), endpoint_change_(endpoint_change) {}

  double endpoint_change() const noexcept { return endpoint_change_; }

 private:
  double endpoint_change_;
};

/// N = I + zA(V) is singular at the requested test-equation point.
class SingularStageMatrixError : public Error {
 public:
  SingularStageMatrixError(const std::string& what, double V, double z) : Error(what), V_(V), z_(z) {}

  double V() const noexcept { return V_; }
  double z() const noexcept { return z_; }

 private:
  double V_;
  double z_;
};

/// tr(S) / (2 sqrt(det S)) lies outside [-1, 1] or V + z <= 0.
class OutsidePeriodicityError : public Error {
 public:
  using Error::Error;
};

}  // namespace ltcm
