#pragma once

#include <stdexcept>
#include <string>

namespace difflab {

//! Base class for all library errors. Carries a plain message; callers that
//! need to distinguish failure classes catch the derived types below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Input outside the mathematical domain of an operation (s <= 0 for a
//! logarithmic transform, t <= 0 for a parabolic scaling, point off-surface).
class DomainError : public Error {
 public:
  using Error::Error;
};

//! Malformed or inconsistent configuration (bad JSON field, overlapping
//! primitives, collar wider than the smooth neighborhood of the boundary).
class ConfigError : public Error {
 public:
  using Error::Error;
};

//! A numeric procedure failed to reach its tolerance: bracketing found no sign
//! change, Newton exhausted its halvings, an integration accuracy check
//! tripped. The message carries diagnostics (location, residual, bounds).
class NumericError : public Error {
 public:
  using Error::Error;
};

//! Grid too coarse for the requested feature (primitive under-resolved by the
//! marching grid, collar thinner than a mesh cell).
class ResolutionError : public Error {
 public:
  using Error::Error;
};

//! Offset distance at or beyond the focal distance of a boundary piece, so the
//! parallel surface is no longer a graph over the boundary.
class CausticError : public Error {
 public:
  using Error::Error;
};

//! Structural mismatch between fields (different grids, different snapshot
//! times) where an operation requires agreement.
class ShapeError : public Error {
 public:
  using Error::Error;
};

//! Operation invoked outside its supported envelope (a detector that is only
//! valid for the linear flux applied to a nonlinear run).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace difflab
