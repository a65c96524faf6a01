#pragma once

#include <stdexcept>
#include <string>

namespace qspec {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unusable input data (non-finite values, bad CSV rows, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation's precondition (bad index, bad level, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace qspec
