#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tmcf {

/// Base class for every error raised by the library. The CLI maps the three
/// subclasses onto distinct process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or invalid input data (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A trace file could not be parsed. Carries the 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Non-finite values or divergence during numerical work (exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace tmcf
