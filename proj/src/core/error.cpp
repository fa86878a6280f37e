#include "expertbayes/error.hpp"

namespace expertbayes {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidStructure: return "InvalidStructure";
    case ErrorCode::CyclicStructure: return "CyclicStructure";
    case ErrorCode::CycleWouldForm: return "CycleWouldForm";
    case ErrorCode::EditInapplicable: return "EditInapplicable";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::UnestimatedCpt: return "UnestimatedCpt";
    case ErrorCode::InvalidEvidenceLabel: return "InvalidEvidenceLabel";
    case ErrorCode::NonBinaryClass: return "NonBinaryClass";
    case ErrorCode::InvalidOrdering: return "InvalidOrdering";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaVersionUnsupported: return "SchemaVersionUnsupported";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::MissingClassColumn: return "MissingClassColumn";
    case ErrorCode::SingleStateClass: return "SingleStateClass";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Cancelled: return "Cancelled";
  }
  return "Unknown";
}

}  // namespace expertbayes
