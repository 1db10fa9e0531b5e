#ifndef GRICE_DIALOGUE_H_
#define GRICE_DIALOGUE_H_

// Dialogue state and turn handling. The blackboard of the dialogue grammar
// system is a string of dialogue-act symbols: each participant is a
// component, and a turn extends the blackboard by one block of that
// participant's component in its current derivation mode. The trailing
// nonterminal names who holds the floor (D: human, R: robot).

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grice/grammar.h"
#include "grice/norms.h"
#include "grice/parse_count.h"
#include "grice/topics.h"

namespace grice {

enum class Role { Human, Robot };

std::string_view to_string(Role role);

struct Participant {
  std::string id;
  Role role = Role::Human;
  std::string component_id;
  DerivationMode mode = DerivationMode::terminal();

  bool operator==(const Participant&) const = default;
};

struct Utterance {
  std::string speaker;
  std::string text;
  std::vector<Assertion> assertions;
  std::int64_t timestamp = 0;  // ms since epoch

  bool operator==(const Utterance&) const = default;
};

enum class ActTag {
  Interrupt,
  AskForMore,
  FollowNewTopic,
  ResumePreviousTopic,
  Clarify,
  Challenge,
};

std::string_view to_string(ActTag tag);
ActTag parse_act_tag(std::string_view name);

struct ModeSwitch {
  std::string participant;
  DerivationMode mode;

  bool operator==(const ModeSwitch&) const = default;
};

struct RecoveryAct {
  ActTag tag = ActTag::AskForMore;
  int triggered_by = 0;  // index into the turn's breaches
  std::optional<ModeSwitch> mode_switch;

  bool operator==(const RecoveryAct&) const = default;
};

// The policy table, one row per breach, in input order.
std::vector<RecoveryAct> decide_acts(std::span<const BreachEvent> breaches,
                                     const MonitorConfig& cfg);

struct DialogueConfig {
  MonitorConfig monitor;
  int inference_sweeps = 50;
  // Run the "X is Y" extractor on turns that carry no structured assertions.
  bool extract_assertions = false;
  // Beliefs the robot starts from.
  std::vector<Assertion> initial_beliefs;

  // Throws Error(ConfigInvalid).
  void validate() const;

  bool operator==(const DialogueConfig&) const = default;
};

// Act-tag keyed reply templates with {topic} and {slot} placeholders. Besides
// the RecoveryAct tags, "Acknowledge" and "Goodbye" are required.
class ReplyTemplates {
 public:
  static ReplyTemplates defaults();
  static std::string_view default_json();
  // Throws Error(ConfigInvalid) on a malformed or incomplete map.
  static ReplyTemplates parse(std::string_view json_text);
  static ReplyTemplates load(const std::filesystem::path& path);

  // Picks template `variant` modulo the number available.
  std::string render(std::string_view key, std::size_t variant,
                     std::string_view topic, std::string_view slot) const;

  const std::map<std::string, std::vector<std::string>>& entries() const {
    return by_key_;
  }
  bool operator==(const ReplyTemplates&) const = default;

 private:
  std::map<std::string, std::vector<std::string>> by_key_;
};

std::string_view default_dialogue_grammar_text();
Cdgs default_dialogue_grammar();
// Throws Error(ConfigInvalid) unless the grammar has the components, floor
// nonterminals, and act terminals the dialogue manager relies on.
void validate_dialogue_grammar(const Cdgs& grammar);

struct DialogueModels {
  std::shared_ptr<const Cdgs> grammar;
  std::shared_ptr<const TopicModel> topics;
  std::shared_ptr<const ContextFreeGrammar> reference;  // optional
  ReplyTemplates templates = ReplyTemplates::defaults();
  std::string grammar_hash;
  std::string model_hash;
};

struct Turn {
  int index = 0;
  Utterance utterance;
  std::vector<BreachEvent> breaches;
  std::vector<RecoveryAct> acts;
  std::optional<Utterance> reply;  // absent when replies are suppressed
  std::vector<BreachEvent> reply_breaches;
  std::vector<TraceBlock> blocks;  // speaker's block, then the robot's
  SententialForm blackboard;       // after this turn
  std::map<std::string, DerivationMode> modes;  // after this turn
  std::optional<Distribution> context_theta;     // after this turn
  std::vector<std::size_t> topic_stack;          // after this turn
  bool committed = false;  // assertions entered the belief store

  bool operator==(const Turn&) const = default;
};

struct DialogueState {
  std::string id;
  DialogueConfig config;
  std::vector<Participant> participants;
  std::vector<Turn> turns;
  SententialForm blackboard;
  std::optional<Distribution> context_theta;
  std::vector<std::size_t> topic_stack;
  BeliefStore beliefs;        // the robot's
  BeliefStore human_beliefs;  // placeholder for a model of the human
  std::string grammar_hash;
  std::string model_hash;

  const Participant* find(std::string_view participant_id) const;
  // The participant whose component can rewrite the blackboard; absent once
  // the dialogue has ended.
  std::optional<std::string> floor_holder(const Cdgs& grammar) const;

  bool operator==(const DialogueState&) const = default;
};

// Loads nothing: `models` must already hold a grammar and a topic model
// (Error(ModelMissing) otherwise).
DialogueState new_dialogue(std::string id, const DialogueConfig& config,
                           const DialogueModels& models);

struct HandleOptions {
  bool suppress_reply = false;  // audit mode
};

struct TurnOutcome {
  Turn turn;
  DialogueState state;
};

// Monitors the utterance, decides recovery acts, extends the blackboard by
// the speaker's block and the robot's answering block, and renders the
// robot's reply. Throws Error(NotYourTurn) when the speaker does not hold the
// floor and Error(UnknownParticipant) for unregistered speakers.
TurnOutcome handle_turn(const DialogueState& state, const Utterance& utterance,
                        const DialogueModels& models,
                        const HandleOptions& options = {});

// Throws Error(UnknownParticipant).
DialogueState apply_mode_switch(DialogueState state,
                                std::string_view participant_id,
                                DerivationMode mode);

// Dialogue-act symbols a human utterance contributes, in order: one per
// sentence ("ask" for questions, "answer" for a leading yes/no, "bye" for a
// farewell, "inform" otherwise).
std::vector<std::string> classify_acts(std::string_view text);

// Replays every recorded block from the axiom; returns the blackboard.
SententialForm replay_blackboard(const DialogueState& state,
                                 const Cdgs& grammar);

// JSON-lines trace: a header record, then one record per turn.
std::string serialize_trace(const DialogueState& state);
// Throws Error(TraceCorrupt) naming the first bad record.
DialogueState replay_trace(std::string_view document, const Cdgs& grammar);
DialogueState replay_trace(std::string_view document);

}  // namespace grice

#endif  // GRICE_DIALOGUE_H_
