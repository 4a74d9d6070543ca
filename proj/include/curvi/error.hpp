#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvi {

// Base for every error the library throws. The CLI maps the concrete type
// to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Zero-area triangles, zero-length edges, planes through the eye.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Parameter or dimension violations (odd map sizes, Ω out of range, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. `position()` is a character offset for file names
// and a 1-based line number for scene files.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at " + std::to_string(position) + ")"), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// A library contract was broken internally (e.g. merged coverage above 1).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace curvi
