#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vocadapt {

enum class ErrorCode {
  IoError,
  FormatError,
  EncodingError,
  EmptyCorpus,
  DuplicateToken,
  EmptyToken,
  TargetTooSmall,
  OutOfRange,
  DimMismatch,
  MissingBaseVector,
  ParseError,
  ZeroVector,
  SizeMismatch,
  InvalidTarget,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Carries a typed code so callers (the CLI in
/// particular) can map failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for errors caused by a bad configuration or flag value rather
  /// than bad input data (exit code 2 vs 3 at the CLI boundary).
  bool is_usage_error() const noexcept {
    return code_ == ErrorCode::TargetTooSmall || code_ == ErrorCode::InvalidArgument;
  }

 private:
  ErrorCode code_;
};

}  // namespace vocadapt
