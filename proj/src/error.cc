#include "grice/error.h"

namespace grice {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UndeclaredSymbol: return "UndeclaredSymbol";
    case ErrorCode::ErasingRuleRejected: return "ErasingRuleRejected";
    case ErrorCode::EmptyComponent: return "EmptyComponent";
    case ErrorCode::DuplicateComponentId: return "DuplicateComponentId";
    case ErrorCode::NonTerminalInput: return "NonTerminalInput";
    case ErrorCode::NotEpsilonFree: return "NotEpsilonFree";
    case ErrorCode::InvalidTrace: return "InvalidTrace";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyAfterFiltering: return "EmptyAfterFiltering";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ModelMissing: return "ModelMissing";
    case ErrorCode::NotYourTurn: return "NotYourTurn";
    case ErrorCode::UnknownParticipant: return "UnknownParticipant";
    case ErrorCode::TraceCorrupt: return "TraceCorrupt";
    case ErrorCode::TranscriptMalformed: return "TranscriptMalformed";
    case ErrorCode::DialogueNotFound: return "DialogueNotFound";
    case ErrorCode::DialogueExists: return "DialogueExists";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string located(std::string message, SourceLocation where) {
  std::string prefix = "line " + std::to_string(where.line);
  if (where.column > 0) prefix += ", column " + std::to_string(where.column);
  return prefix + ": " + message;
}

}  // namespace

Error::Error(ErrorCode code, std::string message)
    : std::runtime_error(std::move(message)), code_(code) {}

Error::Error(ErrorCode code, std::string message, SourceLocation where)
    : std::runtime_error(located(std::move(message), where)),
      code_(code),
      where_(where) {}

}  // namespace grice
