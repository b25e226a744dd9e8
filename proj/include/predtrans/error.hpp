#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace predtrans {

struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state-space or exploration limit was hit.
class CeilingExceeded : public Error {
 public:
  using Error::Error;
};

/// Evaluating a formula needed a variable the valuation does not assign,
/// or a formula operation was applied outside its precondition.
class FormulaError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string message, SourceSpan span)
      : Error(message + " at offset " + std::to_string(span.start)),
        message_(std::move(message)),
        span_(span) {}

  const std::string& message() const { return message_; }
  SourceSpan span() const { return span_; }

 private:
  std::string message_;
  SourceSpan span_;
};

/// A checker or generator could not produce an answer (unknown claim,
/// resampling budget exhausted, malformed request).
class CheckError : public Error {
 public:
  using Error::Error;
};

}  // namespace predtrans
