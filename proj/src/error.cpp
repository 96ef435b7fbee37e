#include "alphaforge/error.hpp"

namespace alphaforge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::DuplicateDate: return "DuplicateDate";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::EmptyUniverse: return "EmptyUniverse";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SingleClassDataset: return "SingleClassDataset";
    case ErrorCode::CorruptModelFile: return "CorruptModelFile";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::InvalidProbabilities: return "InvalidProbabilities";
    case ErrorCode::ZeroAtr: return "ZeroAtr";
    case ErrorCode::OverdraftRejected: return "OverdraftRejected";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::UnmatchedSell: return "UnmatchedSell";
    case ErrorCode::MissingRangeData: return "MissingRangeData";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Config: return "Config";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace alphaforge
