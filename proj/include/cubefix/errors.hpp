#pragma once

#include <stdexcept>
#include <string>

namespace cubefix {

/// Caller violated a documented precondition (bad parameters, dimension mismatch).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The grid or candidate set would exceed the configured size limit.
class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An oracle answered outside its declared domain, or was queried outside it.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A guarantee that holds for every correct build was observed broken.
class InternalInvariantFailure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw UsageError(what);
}

}  // namespace detail
}  // namespace cubefix
