#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phoenix {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input. `position` is a byte offset for formula text and
/// a 1-based line number for line-oriented files.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at " + std::to_string(position) + ")"), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Inputs that are individually well-formed but do not fit together
/// (unknown symbols, alphabet mismatch, inconsistent samples).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace phoenix
