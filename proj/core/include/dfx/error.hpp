#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dfx {

enum class Errc {
  InvalidArgument,
  SpaceTooLarge,
  OutOfBounds,
  UnsupportedCardinality,
  FeatureOutOfRange,
  SyntaxError,
  ArityError,
  LabelDomainError,
  BudgetExceeded,
  NonLatticeThreshold,
  SearchBudgetExceeded,
  PreconditionViolated,
  EmptyRegion,
  EmptyDataset,
  MalformedRow,
  ChecksumMismatch,
  UnreachableSource,
  EmptyTable,
  IoError,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Failure while reading text input; positions are 1-based.
class ParseError : public Error {
 public:
  ParseError(Errc code, const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace dfx
