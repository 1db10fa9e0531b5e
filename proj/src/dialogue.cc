#include "grice/dialogue.h"

#include <algorithm>

#include "grice/error.h"
#include "grice/text.h"

namespace grice {

namespace {

// Mirrors resources/dialogue.cdgs.
constexpr std::string_view kDialogueGrammar = R"cdgs(# Dialogue grammar. The blackboard is a string of dialogue acts; its one
# nonterminal marks the floor: D for the human, R for the robot. An act
# followed by the speaker's own marker keeps the floor, one followed by the
# other marker hands it over, and bye ends the dialogue.
nonterminals: D R
terminals: inform ask answer ack askMore interrupt follow resume clarify challenge bye
axiom: D
mode: t

component human:
  D -> inform D
  D -> ask D
  D -> answer D
  D -> inform R
  D -> ask R
  D -> answer R
  D -> bye

component robot:
  R -> ack R
  R -> askMore R
  R -> interrupt R
  R -> follow R
  R -> resume R
  R -> clarify R
  R -> challenge R
  R -> ack D
  R -> askMore D
  R -> interrupt D
  R -> follow D
  R -> resume D
  R -> clarify D
  R -> challenge D
  R -> bye
)cdgs";

constexpr const char* kHumanFloor = "D";
constexpr const char* kRobotFloor = "R";
const std::vector<std::string> kHumanActs = {"inform", "ask", "answer"};
const std::vector<std::string> kRobotActs = {
    "ack", "askMore", "interrupt", "follow", "resume", "clarify", "challenge"};

std::string_view act_symbol(ActTag tag) {
  switch (tag) {
    case ActTag::Interrupt: return "interrupt";
    case ActTag::AskForMore: return "askMore";
    case ActTag::FollowNewTopic: return "follow";
    case ActTag::ResumePreviousTopic: return "resume";
    case ActTag::Clarify: return "clarify";
    case ActTag::Challenge: return "challenge";
  }
  return "ack";
}

const Production* find_production(const Component& c, std::string_view lhs,
                                  std::span<const std::string_view> rhs) {
  for (const auto& p : c.productions) {
    if (p.lhs.name != lhs || p.rhs.size() != rhs.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < rhs.size() && same; ++i) {
      same = p.rhs[i].name == rhs[i];
    }
    if (same) return &p;
  }
  return nullptr;
}

// Number of rewrites a block of `mode` performs for `wanted` acts.
std::size_t block_length(DerivationMode mode, std::size_t wanted) {
  const auto k = static_cast<std::size_t>(mode.k);
  switch (mode.tag) {
    case ModeTag::Star:
    case ModeTag::Terminal: return wanted;
    case ModeTag::AtMost: return std::min(wanted, k);
    case ModeTag::Exactly: return k;
    case ModeTag::AtLeast: return std::max(wanted, k);
  }
  return wanted;
}

// Builds the block in which `component` appends `acts` at its floor marker
// and then hands the floor to `yield`. The act list is cut or padded (with
// `filler` before the final act) to the length the mode demands.
TraceBlock build_block(const Component& component, const SententialForm& form,
                       DerivationMode mode, std::vector<std::string> acts,
                       std::string_view own, std::string_view yield,
                       const std::string& filler) {
  if (acts.empty()) acts.push_back(filler);
  auto bye = std::find(acts.begin(), acts.end(), "bye");
  if (bye != acts.end()) acts.erase(bye + 1, acts.end());
  const std::size_t n = block_length(mode, acts.size());
  if (n < acts.size()) {
    acts.resize(n);
  } else {
    acts.insert(acts.end() - 1, n - acts.size(), filler);
  }

  auto at = std::find_if(form.begin(), form.end(), [&](const Symbol& s) {
    return !s.is_terminal() && s.name == own;
  });
  if (at == form.end()) {
    throw Error(ErrorCode::NotYourTurn,
                "component '" + component.id + "' does not hold the floor");
  }
  std::size_t pos = static_cast<std::size_t>(at - form.begin());

  TraceBlock block{component.id, mode, {}, {}};
  for (std::size_t i = 0; i < acts.size(); ++i) {
    const bool last = i + 1 == acts.size();
    std::vector<std::string_view> rhs = {acts[i]};
    if (acts[i] != "bye") rhs.push_back(last ? yield : own);
    const Production* p = find_production(component, own, rhs);
    if (!p) {
      std::string want(own);
      want += " ->";
      for (auto s : rhs) (want += " ") += s;
      throw Error(ErrorCode::ConfigInvalid, "dialogue grammar component '" +
                                                component.id + "' lacks '" +
                                                want + "'");
    }
    block.steps.push_back({*p, pos});
    ++pos;
  }
  block.result = apply_block(component, form, mode, block.steps);
  return block;
}

std::string topic_label(const DialogueModels& models,
                        std::optional<std::size_t> topic) {
  if (!topic || !models.topics || *topic >= models.topics->topics()) {
    return "that";
  }
  auto words = models.topics->top_words(*topic, 1);
  return words.empty() ? "that" : words.front();
}

std::uint64_t turn_seed(std::string_view dialogue_id, int turn_index) {
  return fnv1a(std::string(dialogue_id) + ":" + std::to_string(turn_index));
}

}  // namespace

std::string_view to_string(Role role) {
  return role == Role::Human ? "human" : "robot";
}

std::string_view default_dialogue_grammar_text() { return kDialogueGrammar; }

Cdgs default_dialogue_grammar() { return parse_grammar(kDialogueGrammar); }

void validate_dialogue_grammar(const Cdgs& g) {
  auto bad = [](const std::string& what) {
    return Error(ErrorCode::ConfigInvalid, "dialogue grammar: " + what);
  };
  if (g.axiom().name != kHumanFloor) throw bad("axiom must be D");
  for (const char* nt : {kHumanFloor, kRobotFloor}) {
    auto s = g.lookup(nt);
    if (!s || s->is_terminal()) throw bad(std::string("missing nonterminal ") + nt);
  }
  auto require = [&](const char* component_id, const std::vector<std::string>& acts,
                     std::string_view own, std::string_view other) {
    const Component* c = g.find_component(component_id);
    if (!c) throw bad(std::string("missing component ") + component_id);
    std::vector<std::vector<std::string_view>> wanted = {{"bye"}};
    for (const auto& a : acts) {
      wanted.push_back({a, own});
      wanted.push_back({a, other});
    }
    for (const auto& rhs : wanted) {
      if (!find_production(*c, own, rhs)) {
        throw bad(std::string("component ") + component_id +
                  " lacks a rule for '" + std::string(rhs[0]) + "'");
      }
    }
    for (const auto& p : c->productions) {
      if (p.lhs.name != own) {
        throw bad(std::string("component ") + component_id +
                  " may only rewrite its own floor marker");
      }
    }
  };
  require("human", kHumanActs, kHumanFloor, kRobotFloor);
  require("robot", kRobotActs, kRobotFloor, kHumanFloor);
}

void DialogueConfig::validate() const {
  monitor.validate();
  if (inference_sweeps < 1) {
    throw Error(ErrorCode::ConfigInvalid, "inference_sweeps must be >= 1");
  }
  BeliefStore probe;
  for (const auto& a : initial_beliefs) {
    if (a.subject.empty() || a.predicate.empty() || a.object.empty()) {
      throw Error(ErrorCode::ConfigInvalid, "initial belief with an empty term");
    }
    if (probe.insert(a) == BeliefStore::Insert::Rejected) {
      throw Error(ErrorCode::ConfigInvalid,
                  "initial beliefs contradict each other on '" + a.triple() + "'");
    }
  }
}

const Participant* DialogueState::find(std::string_view participant_id) const {
  for (const auto& p : participants) {
    if (p.id == participant_id) return &p;
  }
  return nullptr;
}

std::optional<std::string> DialogueState::floor_holder(const Cdgs& g) const {
  for (const auto& p : participants) {
    const Component* c = g.find_component(p.component_id);
    if (c && c->has_applicable_rule(blackboard)) return p.id;
  }
  return std::nullopt;
}

DialogueState new_dialogue(std::string id, const DialogueConfig& config,
                           const DialogueModels& models) {
  config.validate();
  if (!models.grammar) {
    throw Error(ErrorCode::ModelMissing, "no dialogue grammar loaded");
  }
  if (!models.topics) throw Error(ErrorCode::ModelMissing, "no topic model loaded");
  validate_dialogue_grammar(*models.grammar);

  DialogueState s;
  s.id = std::move(id);
  s.config = config;
  s.participants = {
      {"human", Role::Human, "human", DerivationMode::terminal()},
      {"robot", Role::Robot, "robot", DerivationMode::terminal()},
  };
  s.blackboard = {models.grammar->axiom()};
  for (const auto& a : config.initial_beliefs) s.beliefs.insert(a);
  s.grammar_hash = models.grammar_hash;
  s.model_hash = models.model_hash;
  return s;
}

std::vector<std::string> classify_acts(std::string_view text) {
  static const char* const kAnswers[] = {"yes", "no", "yeah", "nope", "sure"};
  std::vector<std::string> acts;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find_first_of(".!?", start);
    const bool question = end != std::string_view::npos && text[end] == '?';
    if (end == std::string_view::npos) end = text.size();
    auto words = tokenize_words(text.substr(start, end - start));
    start = end + 1;
    if (words.empty()) continue;
    if (std::find(words.begin(), words.end(), "bye") != words.end() ||
        std::find(words.begin(), words.end(), "goodbye") != words.end()) {
      acts.push_back("bye");
      break;
    }
    if (question) {
      acts.push_back("ask");
    } else if (acts.empty() && std::find(std::begin(kAnswers), std::end(kAnswers),
                                         words.front()) != std::end(kAnswers)) {
      acts.push_back("answer");
    } else {
      acts.push_back("inform");
    }
  }
  if (acts.empty()) acts.push_back("inform");
  return acts;
}

TurnOutcome handle_turn(const DialogueState& state, const Utterance& utterance,
                        const DialogueModels& models,
                        const HandleOptions& options) {
  if (!models.grammar || !models.topics) {
    throw Error(ErrorCode::ModelMissing, "dialogue models are not loaded");
  }
  const Cdgs& g = *models.grammar;
  const Participant* speaker = state.find(utterance.speaker);
  if (!speaker) {
    throw Error(ErrorCode::UnknownParticipant,
                "unknown speaker '" + utterance.speaker + "'");
  }
  auto holder = state.floor_holder(g);
  if (holder != speaker->id) {
    throw Error(ErrorCode::NotYourTurn,
                holder ? "'" + *holder + "' holds the floor"
                       : std::string("the dialogue has ended"));
  }
  for (const auto& a : utterance.assertions) {
    if (a.subject.empty() || a.predicate.empty() || a.object.empty()) {
      throw Error(ErrorCode::BadRequest, "assertion terms must be non-empty");
    }
  }

  const MonitorConfig& cfg = state.config.monitor;
  TurnOutcome out{Turn{}, state};
  DialogueState& next = out.state;
  Turn& turn = out.turn;
  turn.index = static_cast<int>(state.turns.size());
  turn.utterance = utterance;
  if (turn.utterance.assertions.empty() && state.config.extract_assertions) {
    turn.utterance.assertions = extract_assertions(utterance.text);
  }
  const bool human = speaker->role == Role::Human;
  const auto words = tokenize_words(utterance.text);

  std::optional<Distribution> turn_theta;
  if (human || cfg.monitor_robot) {
    TurnInput input{turn.index, words, turn.utterance.assertions};
    MonitorContext context{&state.beliefs, state.context_theta,
                           turn_seed(state.id, turn.index),
                           state.config.inference_sweeps};
    MonitorModels monitor_models{models.topics.get(), models.reference.get()};
    auto monitored = run_all(input, context, monitor_models, cfg);
    turn.breaches = std::move(monitored.breaches);
    next.context_theta = std::move(monitored.context_theta);
    turn_theta = std::move(monitored.turn_theta);
  }
  if (human) turn.acts = decide_acts(turn.breaches, cfg);

  // Topic stack: the first topical turn opens it, FollowNewTopic pushes the
  // new topic, ResumePreviousTopic keeps the established one on top.
  std::optional<std::size_t> turn_topic;
  if (turn_theta) turn_topic = argmax(*turn_theta);
  if (turn_topic && next.topic_stack.empty()) {
    next.topic_stack.push_back(*turn_topic);
  }
  for (const auto& act : turn.acts) {
    if (act.tag == ActTag::FollowNewTopic && turn_topic &&
        next.topic_stack.back() != *turn_topic) {
      next.topic_stack.push_back(*turn_topic);
    }
  }

  // Speaker's block, in the speaker's current mode.
  auto mode_of = [&](const std::string& id) -> DerivationMode& {
    for (auto& p : next.participants) {
      if (p.id == id) return p.mode;
    }
    throw Error(ErrorCode::UnknownParticipant, "unknown participant '" + id + "'");
  };
  const std::string own = human ? kHumanFloor : kRobotFloor;
  const std::string other = human ? kRobotFloor : kHumanFloor;
  turn.blocks.push_back(build_block(
      g.component(speaker->component_id), next.blackboard, speaker->mode,
      human ? classify_acts(utterance.text) : std::vector<std::string>{"ack"},
      own, other, human ? "inform" : "ack"));
  next.blackboard = turn.blocks.back().result;
  mode_of(speaker->id) = DerivationMode::terminal();

  // The robot answers within the same call whenever it now holds the floor.
  const Participant* robot = nullptr;
  for (const auto& p : next.participants) {
    if (p.role == Role::Robot) robot = &p;
  }
  const bool robot_answers =
      human && robot && next.floor_holder(g) == robot->id;
  if (robot_answers) {
    std::vector<std::string> robot_acts;
    for (const auto& act : turn.acts) {
      robot_acts.emplace_back(act_symbol(act.tag));
    }
    turn.blocks.push_back(build_block(g.component(robot->component_id),
                                      next.blackboard, robot->mode,
                                      std::move(robot_acts), kRobotFloor,
                                      kHumanFloor, "ack"));
    next.blackboard = turn.blocks.back().result;
    mode_of(robot->id) = DerivationMode::terminal();
  }
  for (const auto& act : turn.acts) {
    if (act.mode_switch) mode_of(act.mode_switch->participant) = act.mode_switch->mode;
  }

  if (human && !options.suppress_reply) {
    std::optional<std::size_t> established;
    if (!next.topic_stack.empty()) established = next.topic_stack.back();
    const auto content = content_words(words);
    std::string text;
    auto add = [&](std::string_view key, std::optional<std::size_t> topic,
                   std::string_view slot) {
      auto sentence = models.templates.render(
          key, static_cast<std::size_t>(turn.index), topic_label(models, topic),
          slot);
      if (text.find(sentence) != std::string::npos) return;
      if (!text.empty()) text += ' ';
      text += sentence;
    };
    if (!robot_answers) {
      add("Goodbye", established, "");
    } else if (turn.acts.empty()) {
      add("Acknowledge", established, "");
    }
    if (robot_answers) {
      for (const auto& act : turn.acts) {
        const BreachEvent& why = turn.breaches[act.triggered_by];
        std::string slot = topic_label(models, established);
        if (act.tag == ActTag::AskForMore && !content.empty()) {
          slot = content.back();
        } else if (why.payload.contains("assertion")) {
          const auto& a = why.payload["assertion"];
          slot = a["subject"].get<std::string>() + " " +
                 a["predicate"].get<std::string>() + " " +
                 a["object"].get<std::string>();
        } else if (act.tag == ActTag::Clarify) {
          slot.clear();
          for (const auto& w : words) slot += (slot.empty() ? "" : " ") + w;
        }
        auto topic = act.tag == ActTag::FollowNewTopic ? turn_topic : established;
        add(to_string(act.tag), topic, slot);
      }
    }
    turn.reply = Utterance{robot ? robot->id : "robot", text, {},
                           utterance.timestamp};
    if (cfg.monitor_robot) {
      TurnInput input{turn.index, tokenize_words(text), {}};
      MonitorModels reply_models{nullptr, models.reference.get()};
      turn.reply_breaches = run_all(input, MonitorContext{}, reply_models, cfg).breaches;
    }
  }

  if (human && turn.breaches.empty()) {
    for (const auto& a : turn.utterance.assertions) next.beliefs.insert(a);
    turn.committed = true;
  }

  turn.blackboard = next.blackboard;
  for (const auto& p : next.participants) turn.modes.emplace(p.id, p.mode);
  turn.context_theta = next.context_theta;
  turn.topic_stack = next.topic_stack;
  next.turns.push_back(turn);
  return out;
}

DialogueState apply_mode_switch(DialogueState state,
                                std::string_view participant_id,
                                DerivationMode mode) {
  for (auto& p : state.participants) {
    if (p.id == participant_id) {
      p.mode = mode;
      return state;
    }
  }
  throw Error(ErrorCode::UnknownParticipant,
              "unknown participant '" + std::string(participant_id) + "'");
}

SententialForm replay_blackboard(const DialogueState& state, const Cdgs& g) {
  DerivationTrace trace;
  for (const auto& t : state.turns) {
    trace.blocks.insert(trace.blocks.end(), t.blocks.begin(), t.blocks.end());
  }
  return replay(g, trace);
}

}  // namespace grice
