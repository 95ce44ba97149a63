#pragma once

#include <stdexcept>
#include <string>

namespace anisorec {

/// Thrown when an argument violates an operation's documented precondition.
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Vector or operator shapes disagree.
class DimensionMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An enumeration would exceed its configured size cap.
class CapExceeded : public std::overflow_error {
public:
  using std::overflow_error::overflow_error;
};

/// NaN or infinity reached a routine that requires finite data.
class NonFiniteInput : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}
} // namespace detail

} // namespace anisorec
