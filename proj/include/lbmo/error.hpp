#pragma once

#include <stdexcept>
#include <string>

namespace lbmo {

/// Base class for every error raised by the toolkit: bad arguments,
/// violated preconditions, unreadable files.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a numerical state becomes unusable (NaN/Inf in the solver,
/// a sampled map that fails its invariants).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lbmo
