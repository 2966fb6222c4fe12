#pragma once

#include <stdexcept>
#include <string>

namespace nuset {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An index tuple (n, p, q, r, eps, omega) outside its admissible range.
class IndexError : public Error {
public:
  using Error::Error;
};

/// A value tree whose shape does not match the declared (nu, n, p).
class ShapeError : public Error {
public:
  using Error::Error;
};

/// Malformed input data (bad key, bad label, missing fiber).
class DataError : public Error {
public:
  using Error::Error;
};

/// Text or JSON that could not be parsed; carries a 1-based position.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

} // namespace nuset
