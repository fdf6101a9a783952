#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace slitlab {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the operation's domain (negative width, xi < 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method ran out of budget before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A request would exceed a configured resource bound.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Measured or simulated data violate an analysis precondition.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the byte offset (or line number) of the fault.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Invalid run configuration. Names the key and the 1-based line it came from (0 if none).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, std::size_t line, const std::string& what)
      : Error(line > 0 ? "config line " + std::to_string(line) + ", key '" + key + "': " + what
                       : "config key '" + key + "': " + what),
        key_(key),
        line_(line) {}

  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

}  // namespace slitlab
