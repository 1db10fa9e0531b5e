#include <cstdio>
#include <fstream>
#include <sstream>

#include "grice/error.h"
#include "grice/service.h"

namespace grice {

namespace {

Error malformed(int line, const std::string& why) {
  return Error(ErrorCode::TranscriptMalformed, why, SourceLocation{line, 0});
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

Transcript parse_transcript(std::string_view text) {
  Transcript t;
  bool seen_record = false;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw malformed(line_no, std::string("not JSON: ") + e.what());
    }
    if (!j.is_object()) throw malformed(line_no, "record must be an object");

    // A trace file is also a transcript: its header carries configSnapshot.
    if (!seen_record && !j.contains("speaker")) {
      if (j.contains("dialogueId")) {
        if (!j["dialogueId"].is_string()) throw malformed(line_no, "dialogueId must be a string");
        t.dialogue_id = j["dialogueId"].get<std::string>();
      }
      if (j.contains("config")) t.config = j["config"];
      else if (j.contains("configSnapshot")) t.config = j["configSnapshot"];
      if (!t.config.is_null() && !t.config.is_object()) {
        throw malformed(line_no, "config must be an object");
      }
      seen_record = true;
      continue;
    }
    seen_record = true;

    Utterance u;
    if (!j.contains("speaker") || !j["speaker"].is_string()) {
      throw malformed(line_no, "turn needs a string 'speaker'");
    }
    if (!j.contains("text") || !j["text"].is_string()) {
      throw malformed(line_no, "turn needs a string 'text'");
    }
    u.speaker = j["speaker"].get<std::string>();
    u.text = j["text"].get<std::string>();
    if (j.contains("timestamp")) {
      if (!j["timestamp"].is_number_integer()) throw malformed(line_no, "timestamp must be an integer");
      u.timestamp = j["timestamp"].get<std::int64_t>();
    }
    if (j.contains("assertions")) {
      if (!j["assertions"].is_array()) throw malformed(line_no, "assertions must be an array");
      try {
        for (const auto& a : j["assertions"]) u.assertions.push_back(assertion_from_json(a));
      } catch (const Error& e) {
        throw malformed(line_no, e.what());
      }
    }
    t.turns.push_back(std::move(u));
  }
  return t;
}

Transcript load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_transcript(buf.str());
}

json annotation_json(const Turn& turn) {
  json breaches = json::array();
  for (const auto& e : turn.breaches) breaches.push_back(to_json(e));
  json acts = json::array();
  for (const auto& a : turn.acts) acts.push_back(to_json(a));
  json modes = json::object();
  for (const auto& [id, mode] : turn.modes) modes[id] = to_string(mode);
  return {{"turnIndex", turn.index},
          {"speaker", turn.utterance.speaker},
          {"text", turn.utterance.text},
          {"breaches", breaches},
          {"acts", acts},
          {"blackboard", to_string(turn.blackboard)},
          {"modes", modes}};
}

BreachReport audit_transcript(const Transcript& transcript,
                              const DialogueConfig& base,
                              const DialogueModels& models) {
  const auto config = apply_overrides(base, transcript.config);
  BreachReport report{new_dialogue(transcript.dialogue_id.value_or(kAuditDialogueId),
                                   config, models)};
  for (const auto& u : transcript.turns) {
    const Participant* p = report.state.find(u.speaker);
    if (p && p->role == Role::Robot) continue;
    report.state =
        handle_turn(report.state, u, models, HandleOptions{true}).state;
  }
  return report;
}

json BreachReport::to_json() const {
  std::map<BreachKind, int> counts;
  json turns = json::array();
  int total = 0;
  for (const auto& t : state.turns) {
    for (const auto& e : t.breaches) {
      ++counts[e.kind];
      ++total;
    }
    turns.push_back(annotation_json(t));
  }
  json summary = json::array();
  for (auto kind : kAllBreachKinds) {
    summary.push_back({{"maxim", to_string(maxim_of(kind))},
                       {"kind", to_string(kind)},
                       {"count", counts[kind]}});
  }
  return {{"dialogueId", state.id},
          {"config", grice::to_json(state.config)},
          {"grammarHash", state.grammar_hash},
          {"modelHash", state.model_hash},
          {"totalBreaches", total},
          {"counts", summary},
          {"turns", turns}};
}

std::string BreachReport::to_text() const {
  std::ostringstream out;
  std::map<BreachKind, int> counts;
  int total = 0;
  for (const auto& t : state.turns) {
    for (const auto& e : t.breaches) {
      ++counts[e.kind];
      ++total;
    }
  }
  out << "dialogue " << state.id << ": " << state.turns.size() << " turns, "
      << total << " breaches\n";
  for (auto kind : kAllBreachKinds) {
    if (counts[kind] == 0) continue;
    out << "  " << to_string(maxim_of(kind)) << '/' << to_string(kind) << ": "
        << counts[kind] << '\n';
  }
  for (const auto& t : state.turns) {
    out << "turn " << t.index << " [" << t.utterance.speaker << "] "
        << t.utterance.text << '\n';
    for (const auto& e : t.breaches) {
      out << "  " << to_string(e.maxim) << '/' << to_string(e.kind)
          << " severity " << fixed2(e.severity) << ": " << e.evidence << '\n';
    }
    for (const auto& a : t.acts) {
      out << "  -> " << to_string(a.tag);
      if (a.mode_switch) {
        out << " (" << a.mode_switch->participant << " to "
            << to_string(a.mode_switch->mode) << ')';
      }
      out << '\n';
    }
    out << "  blackboard " << to_string(t.blackboard) << '\n';
  }
  return out.str();
}

}  // namespace grice
