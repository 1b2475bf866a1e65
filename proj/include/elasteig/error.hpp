#pragma once

#include <stdexcept>
#include <string>

namespace elasteig {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input data: malformed files, inconsistent meshes, bad parameters.
class InputError : public Error {
public:
  using Error::Error;
};

/// Linear algebra or eigensolver breakdown.
class SolverError : public Error {
public:
  using Error::Error;
};

} // namespace elasteig
