#pragma once

#include <stdexcept>
#include <string>

namespace spanmeta {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented contract (malformed file contents, bad
// hyperparameter, unknown span type, ...). The CLI maps it to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read or written. The CLI maps it to exit code 2.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace spanmeta
