#include "dfx/error.hpp"

namespace dfx {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::SpaceTooLarge: return "SpaceTooLarge";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::UnsupportedCardinality: return "UnsupportedCardinality";
    case Errc::FeatureOutOfRange: return "FeatureOutOfRange";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::ArityError: return "ArityError";
    case Errc::LabelDomainError: return "LabelDomainError";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::NonLatticeThreshold: return "NonLatticeThreshold";
    case Errc::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::EmptyRegion: return "EmptyRegion";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::UnreachableSource: return "UnreachableSource";
    case Errc::EmptyTable: return "EmptyTable";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ParseError::ParseError(Errc code, const std::string& message, std::size_t line, std::size_t column)
    : Error(code, message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

}  // namespace dfx
