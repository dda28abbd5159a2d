#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace immunorec {

enum class ErrorCode {
  kInvalidScalePoint,
  kOutOfRange,
  kDuplicateRating,
  kDuplicateUser,
  kInsufficientOverlap,
  kEmptyPool,
  kEmptyPopulation,
  kIo,
  kParse,
  kEmptyDataset,
  kInsufficientRatings,
  kInsufficientAntigens,
  kSampleMismatch,
  kUnknownUser,
  kInvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Line and column are 1-based; column 0 means the whole line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& reason);

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }
  [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string reason_;
};

}  // namespace immunorec
