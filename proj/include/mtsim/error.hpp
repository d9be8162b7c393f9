#pragma once

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mtsim {

// Root of every recoverable error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad command-line usage or out-of-range argument (CLI exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Inconsistent configuration: footprint larger than SSD, epoch longer
// than the trace, malformed hierarchy, and so on (CLI exit code 3).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A snapshot does not fit the pools it is loaded into.
class CapacityError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Input files that fail to parse or validate.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Input that parses but references something out of range, e.g. a block
// id at or beyond the trace footprint.
class ValidationError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Analytical-model precondition failures.
class ModelError : public Error {
 public:
  using Error::Error;
};

[[noreturn]] inline void contract_failure(const char* expr, const char* file, int line,
                                          const char* msg) {
  std::fprintf(stderr, "%s:%d: contract violated: %s (%s)\n", file, line, msg, expr);
  std::abort();
}

}  // namespace mtsim

// Caller contract violations are programming errors, not recoverable
// conditions. Always on, independent of NDEBUG.
#define MTSIM_EXPECTS(cond, msg) \
  ((cond) ? static_cast<void>(0) : ::mtsim::contract_failure(#cond, __FILE__, __LINE__, msg))
