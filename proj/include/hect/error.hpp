#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hect {

enum class ErrorCode {
  SchemaMismatch,
  EmptyEnsemble,
  DegenerateEnsemble,
  DegenerateVariance,
  SingleClass,
  NonFinite,
  TooFewSamples,
  LengthMismatch,
  EmptyNull,
  InvalidConfig,
  InsufficientTrusted,
  ShapeMismatch,
  DuplicateId,
  ParseError,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures remember the 1-based line (0 when not line oriented).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::ParseError,
              line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace hect
