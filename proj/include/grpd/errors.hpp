#pragma once

#include <stdexcept>
#include <string>

namespace grpd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coordinates outside the model (off-grid, a <= 0 for the affine group, bad shape).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A product was requested for a pair that is not composable.
class CompositionError : public Error {
 public:
  using Error::Error;
};

class ModelMismatchError : public Error {
 public:
  using Error::Error;
};

/// No structurally transversal route exists for a convolution.
class TransversalityError : public Error {
 public:
  using Error::Error;
};

/// The wave-front gate W1 x W2 cap ker m = empty failed.
class ConeConditionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Layer fiber order above the supported cap.
class OrderCapError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized input (binary grid, JSON sidecar, scenario).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace grpd
