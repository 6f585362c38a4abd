#include "mdbg/error.hpp"

namespace mdbg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::NonNumericValue: return "NonNumericValue";
    case ErrorCode::SpecOutOfRange: return "SpecOutOfRange";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::EmptyTrain: return "EmptyTrain";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorCode::InvalidAlphabet: return "InvalidAlphabet";
    case ErrorCode::OrderTooSmall: return "OrderTooSmall";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MalformedKey: return "MalformedKey";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::NoNodesInDimension: return "NoNodesInDimension";
    case ErrorCode::NodeNotFound: return "NodeNotFound";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnwritableDirectory: return "UnwritableDirectory";
    case ErrorCode::IntegrityError: return "IntegrityError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::MalformedArchive: return "MalformedArchive";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::UnresolvableState: return "UnresolvableState";
    case ErrorCode::InvalidHorizon: return "InvalidHorizon";
  }
  return "Unknown";
}

}  // namespace mdbg
