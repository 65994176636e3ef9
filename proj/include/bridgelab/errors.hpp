#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bridgelab {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad grid, unnormalized state, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// |s|/hbar too large for the real exponentials of the bridge representation.
class ScalingError : public Error {
 public:
  using Error::Error;
};

/// Two computation paths that must agree did not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A bridge marginal is zero (or not finite) somewhere on the grid.
class ZeroMarginal : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(std::size_t iterations, double residual)
      : Error("Schrödinger system did not converge after " + std::to_string(iterations) +
              " iterations (residual " + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

/// Anti-heat flow amplified content above the spectral cutoff beyond tolerance.
class AntiHeatUnstable : public Error {
 public:
  using Error::Error;
};

/// Closed-form anti-heat step would drive a Gaussian variance to zero or below.
class VarianceCollapse : public Error {
 public:
  using Error::Error;
};

/// Neither root of the width identity keeps the bridge width positive.
class NoValidRoot : public Error {
 public:
  using Error::Error;
};

/// Closed-form bridge width is nonpositive for the requested parameters.
class NonPositiveWidth : public Error {
 public:
  using Error::Error;
};

}  // namespace bridgelab
