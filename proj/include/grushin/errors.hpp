#pragma once

#include <stdexcept>
#include <string>

namespace grushin {

class GrushinError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different ambient dimensions.
class DimensionError : public GrushinError {
 public:
  using GrushinError::GrushinError;
};

/// The grid solver or a fixed-size type does not support this dimension.
class UnsupportedDimension : public GrushinError {
 public:
  using GrushinError::GrushinError;
};

/// A documented precondition was violated by the caller.
class PreconditionError : public GrushinError {
 public:
  using GrushinError::GrushinError;
};

/// A numerical routine failed (quadrature did not converge, stencil invalid, ...).
class NumericalError : public GrushinError {
 public:
  using GrushinError::GrushinError;
};

/// A computation would exceed its configured size budget.
class ResourceLimit : public GrushinError {
 public:
  using GrushinError::GrushinError;
};

/// Malformed or invalid space specification.
class SpecError : public GrushinError {
 public:
  using GrushinError::GrushinError;
};

}  // namespace grushin
