#pragma once

#include <stdexcept>
#include <string>

namespace levi {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Coordinate singularity: |sin q4| fell below the model guard.
class SingularityError : public Error {
public:
  explicit SingularityError(double sin_q4)
      : Error("coordinate singularity: |sin q4| = " + std::to_string(sin_q4) +
              " below guard"),
        sin_q4(sin_q4) {}
  double sin_q4;
};

/// No equilibrium exists: the magnetic vertical force coefficient vanishes.
class NoEquilibriumError : public Error {
public:
  using Error::Error;
};

/// A splitting kernel that requires a separable Hamiltonian got a
/// non-separable model.
class NonSeparableError : public Error {
public:
  using Error::Error;
};

/// Newton iteration hit a (numerically) singular Jacobian.
class SingularJacobianError : public Error {
public:
  using Error::Error;
};

/// An iteration exceeded its maximum step count without converging.
class MaxIterationsError : public Error {
public:
  using Error::Error;
};

/// A trajectory left the admissible region (singularity or non-finite
/// state); carries the last time reached.
class DivergenceError : public Error {
public:
  DivergenceError(std::string what, double time_reached)
      : Error(std::move(what)), time_reached(time_reached) {}
  double time_reached;
};

/// Run and reference trajectories cannot be aligned sample-by-sample.
class SampleAlignmentError : public Error {
public:
  using Error::Error;
};

/// Too few usable points left for a log-log order fit.
class DegenerateRegressionError : public Error {
public:
  using Error::Error;
};

/// Exact rational arithmetic left the supported integer range.
class OverflowError : public Error {
public:
  using Error::Error;
};

/// Invalid configuration or argument.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// File read/write failure.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace levi
