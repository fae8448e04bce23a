#pragma once

#include <stdexcept>
#include <string>

namespace ldsmdl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched or non-finite matrix/vector arguments.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Spectral radius of the transition matrix is at or above one.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// A covariance needed for inference is singular or badly conditioned. In EM
/// this signals collapse towards the boundary of the parameter space.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Second-moment accumulators of the M-step are singular (redundant latent
/// dimensions).
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A generator recursion blew up.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Not enough samples for the requested operation.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or serialized document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// No candidate model order could be fitted.
class SelectionError : public Error {
 public:
  using Error::Error;
};

/// File-system failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ldsmdl
