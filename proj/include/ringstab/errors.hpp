#pragma once

#include <stdexcept>
#include <string>

namespace ringstab {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gain bounds admit no gains satisfying the driving constraints, the
/// magnitude condition and the box at once.
class InfeasibleBoundsError : public Error {
 public:
  using Error::Error;
};

/// The human-driven factor never amplifies (Delta >= 0); no AV is needed,
/// so penetration bounds are undefined.
class NotWorstCaseError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation precondition (argument out of domain).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure failed to converge or produced a non-finite value.
class ComputeError : public Error {
 public:
  using Error::Error;
};

}  // namespace ringstab
