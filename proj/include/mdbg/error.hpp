#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mdbg {

enum class ErrorCode {
  // ingest
  MissingFile,
  RaggedRows,
  NonNumericValue,
  SpecOutOfRange,
  TooShort,
  // discretize
  EmptyTrain,
  DimensionMismatch,
  SymbolOutOfRange,
  InvalidAlphabet,
  // graph
  OrderTooSmall,
  SeriesTooShort,
  ShapeMismatch,
  MalformedKey,
  // diffusion
  EmptyGraph,
  NoConvergence,
  InvalidConfig,
  // query
  WindowTooShort,
  NoNodesInDimension,
  NodeNotFound,
  // export
  IoError,
  UnwritableDirectory,
  IntegrityError,
  VersionMismatch,
  MalformedRow,
  MalformedArchive,
  EmptyBatch,
  // forecast
  UnresolvableState,
  InvalidHorizon,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mdbg
