#pragma once

#include <stdexcept>
#include <string>

namespace expertbayes {

enum class ErrorCode {
  InvalidArgument,
  InvalidStructure,
  CyclicStructure,
  CycleWouldForm,
  EditInapplicable,
  ColumnMismatch,
  EmptyDataset,
  UnestimatedCpt,
  InvalidEvidenceLabel,
  NonBinaryClass,
  InvalidOrdering,
  TooFewRows,
  LengthMismatch,
  ParseError,
  SchemaVersionUnsupported,
  RaggedRow,
  MissingClassColumn,
  SingleStateClass,
  Io,
  Cancelled,
};

// Stable identifier, e.g. "CycleWouldForm". Used in reports and HTTP error bodies.
const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace expertbayes
