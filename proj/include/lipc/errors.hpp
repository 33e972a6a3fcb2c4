#pragma once

#include <stdexcept>
#include <string>

namespace lipc {

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mixing-model constants failed a construction invariant.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Bad input data: dimension mismatch, empty region, unsupported file, ...
class DataError : public Error {
 public:
  using Error::Error;
};

/// Root finder failed to converge. Indicates numerical corruption.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace lipc
