#pragma once

#include <stdexcept>
#include <string>

namespace ddw {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (range, ordering, parity).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A lattice coordinate has the wrong parity for the sublattice it is used on.
class ParityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A numerical procedure could not deliver a result (lost bracket,
/// series did not converge).
class NumericalError : public Error {
 public:
  using Error::Error;
};

namespace detail {

[[noreturn]] inline void throw_domain(const std::string& what) { throw DomainError(what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) throw DomainError(what);
}

}  // namespace detail
}  // namespace ddw
