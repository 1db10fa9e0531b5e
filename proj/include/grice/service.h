#ifndef GRICE_SERVICE_H_
#define GRICE_SERVICE_H_

// Configuration, batch auditing, and the HTTP service around the dialogue
// engine.

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "grice/dialogue.h"
#include "grice/error.h"
#include "grice/json_codec.h"

namespace grice {

// ---------------------------------------------------------------------------
// Configuration.

struct ServerConfig {
  std::string bind_address = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "data";
  std::filesystem::path grammar_path;            // empty: built-in grammar
  std::filesystem::path reference_grammar_path;  // empty: no ambiguity check
  std::filesystem::path topic_model_path;        // required
  std::filesystem::path reply_template_path;     // empty: built-in templates
  DialogueConfig dialogue;
};

// Flat lower_snake_case keys: the ServerConfig fields plus every
// DialogueConfig key. Relative paths resolve against `base_dir`.
// Throws Error(ConfigInvalid) on unknown keys or bad values.
ServerConfig parse_server_config(const json& doc,
                                 const std::filesystem::path& base_dir);
ServerConfig load_server_config(const std::filesystem::path& path);

// Loads and validates every model the config names. Throws Error(ModelMissing)
// or Error(ConfigInvalid).
DialogueModels load_models(const ServerConfig& cfg);

// ---------------------------------------------------------------------------
// Transcripts and audits.

// JSON lines: an optional header {"dialogueId"?, "config"?}, then one turn
// per line {"speaker", "text", "assertions"?, "timestamp"?}. Blank lines and
// lines starting with '#' are skipped.
struct Transcript {
  std::optional<std::string> dialogue_id;
  json config = nullptr;  // overrides, as in POST /v1/dialogues
  std::vector<Utterance> turns;
};

// Throws Error(TranscriptMalformed) with the offending line.
Transcript parse_transcript(std::string_view text);
Transcript load_transcript(const std::filesystem::path& path);

inline constexpr const char* kAuditDialogueId = "audit";

struct BreachReport {
  DialogueState state;

  json to_json() const;
  std::string to_text() const;
};

// Replays the human turns through handle_turn with replies suppressed. Robot
// lines in the transcript are skipped: the engine produces its own blocks.
BreachReport audit_transcript(const Transcript& transcript,
                              const DialogueConfig& base,
                              const DialogueModels& models);

// The per-turn annotation shared by audit reports and turn responses.
json annotation_json(const Turn& turn);

// ---------------------------------------------------------------------------
// Dialogue service.

// Hands out turns in request order.
class FifoMutex {
 public:
  void lock();
  void unlock();

 private:
  std::mutex m_;
  std::condition_variable cv_;
  std::uint64_t next_ = 0;
  std::uint64_t serving_ = 0;
};

// The endpoints as plain functions; errors are thrown as grice::Error.
class DialogueService {
 public:
  DialogueService(ServerConfig cfg, DialogueModels models);

  // Body {"id"?, "config"?}. Returns {"id"}.
  json create_dialogue(const json& body);
  json post_turn(const std::string& id, const json& body);
  json get_dialogue(const std::string& id);
  json get_topics(const std::string& id);

  const ServerConfig& config() const { return cfg_; }

 private:
  struct Session {
    FifoMutex lock;
    std::optional<DialogueState> state;  // absent until loaded
  };

  std::shared_ptr<Session> session(const std::string& id, bool create);
  std::filesystem::path trace_path(const std::string& id) const;
  DialogueState& loaded(Session& s, const std::string& id);

  ServerConfig cfg_;
  DialogueModels models_;
  std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

int http_status(ErrorCode code);
json error_json(const Error& e);

// Serves the HTTP API until stop_server() is called. `on_listening` receives
// the bound port (useful with port 0). Requests are logged to `log` unless it
// is null. Returns false if binding fails.
bool run_server(DialogueService& service, const std::string& host, int port,
                const std::function<void(int)>& on_listening,
                std::ostream* log = &std::cerr);
void stop_server();

// Random RFC 4122 version 4 identifier.
std::string new_uuid();

}  // namespace grice

#endif  // GRICE_SERVICE_H_
