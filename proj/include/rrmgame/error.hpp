#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rrmgame {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, scenario values, or topology descriptions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A probability or other argument outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Threshold formulas whose denominator is not positive.
class DegenerateGameError : public Error {
 public:
  using Error::Error;
};

/// Unknown client, node, or route.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// No path between two hosts.
class RoutingError : public Error {
 public:
  using Error::Error;
};

/// Scenario or topology file syntax error; carries the 1-based line number.
class ParseError : public ConfigError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rrmgame
