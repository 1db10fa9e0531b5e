#ifndef GRICE_ERROR_H_
#define GRICE_ERROR_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace grice {

enum class ErrorCode {
  // grammar files
  SyntaxError,
  UndeclaredSymbol,
  ErasingRuleRejected,
  EmptyComponent,
  DuplicateComponentId,
  // grammar operations
  NonTerminalInput,
  NotEpsilonFree,
  InvalidTrace,
  // topics
  EmptyCorpus,
  EmptyAfterFiltering,
  DimensionMismatch,
  NotNormalized,
  // dialogue
  ConfigInvalid,
  ModelMissing,
  NotYourTurn,
  UnknownParticipant,
  TraceCorrupt,
  // service
  TranscriptMalformed,
  DialogueNotFound,
  DialogueExists,
  BadRequest,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Where an error was detected in a text input. Lines and columns are 1-based;
// `record` is the 0-based index of a JSON-lines record.
struct SourceLocation {
  int line = 0;
  int column = 0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message);
  Error(ErrorCode code, std::string message, SourceLocation where);

  ErrorCode code() const { return code_; }
  const std::optional<SourceLocation>& where() const { return where_; }

 private:
  ErrorCode code_;
  std::optional<SourceLocation> where_;
};

}  // namespace grice

#endif  // GRICE_ERROR_H_
