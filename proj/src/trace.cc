#include <sstream>

#include "grice/error.h"
#include "grice/json_codec.h"

namespace grice {

namespace {

Error bad_request(const std::string& what) {
  return Error(ErrorCode::BadRequest, what);
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw bad_request(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw bad_request(std::string("field '") + key + "' has the wrong type");
  }
}

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw bad_request(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

json distribution_json(const std::optional<Distribution>& d) {
  return d ? json(*d) : json(nullptr);
}

Production production_from_string(const std::string& text, const Cdgs& g) {
  std::istringstream in(text);
  std::string lhs, arrow, name;
  in >> lhs >> arrow;
  auto resolve = [&](const std::string& n) {
    auto s = g.lookup(n);
    if (!s) throw bad_request("unknown symbol '" + n + "' in '" + text + "'");
    return *s;
  };
  if (arrow != "->") throw bad_request("bad production '" + text + "'");
  Production p{resolve(lhs), {}};
  while (in >> name) p.rhs.push_back(resolve(name));
  return p;
}

SententialForm form_from_string(const std::string& text, const Cdgs& g) {
  try {
    return g.read_form(text);
  } catch (const Error& e) {
    throw bad_request(e.what());
  }
}

DerivationMode mode_from_string(const std::string& text) {
  try {
    return parse_mode(text);
  } catch (const Error& e) {
    throw bad_request(e.what());
  }
}

}  // namespace

json to_json(const Assertion& a) {
  return {{"subject", a.subject},
          {"predicate", a.predicate},
          {"object", a.object},
          {"polarity", to_string(a.polarity)},
          {"hedged", a.hedged}};
}

Assertion assertion_from_json(const json& j) {
  Assertion a;
  a.subject = field<std::string>(j, "subject");
  a.predicate = field<std::string>(j, "predicate");
  a.object = field<std::string>(j, "object");
  a.polarity = j.contains("polarity")
                   ? parse_polarity(field<std::string>(j, "polarity"))
                   : Polarity::Affirmed;
  a.hedged = j.contains("hedged") ? field<bool>(j, "hedged") : false;
  if (a.subject.empty() || a.predicate.empty() || a.object.empty()) {
    throw bad_request("assertion terms must be non-empty");
  }
  return a;
}

json to_json(const BreachEvent& e) {
  return {{"maxim", to_string(e.maxim)},
          {"kind", to_string(e.kind)},
          {"severity", e.severity},
          {"turnIndex", e.turn_index},
          {"evidence", e.evidence},
          {"payload", e.payload}};
}

BreachEvent breach_from_json(const json& j) {
  BreachEvent e;
  e.kind = parse_breach_kind(field<std::string>(j, "kind"));
  e.maxim = parse_maxim(field<std::string>(j, "maxim"));
  if (e.maxim != maxim_of(e.kind)) {
    throw bad_request("breach kind does not belong to its maxim");
  }
  e.severity = field<double>(j, "severity");
  if (!(e.severity >= 0 && e.severity <= 1)) {
    throw bad_request("severity outside [0,1]");
  }
  e.turn_index = field<int>(j, "turnIndex");
  e.evidence = field<std::string>(j, "evidence");
  e.payload = j.value("payload", json::object());
  return e;
}

json to_json(const RecoveryAct& a) {
  json j = {{"tag", to_string(a.tag)}, {"triggeredBy", a.triggered_by}};
  if (a.mode_switch) {
    j["modeSwitch"] = {{"participant", a.mode_switch->participant},
                       {"mode", to_string(a.mode_switch->mode)}};
  }
  return j;
}

RecoveryAct act_from_json(const json& j) {
  RecoveryAct a;
  a.tag = parse_act_tag(field<std::string>(j, "tag"));
  a.triggered_by = field<int>(j, "triggeredBy");
  if (j.contains("modeSwitch")) {
    const auto& m = j.at("modeSwitch");
    a.mode_switch = ModeSwitch{field<std::string>(m, "participant"),
                               mode_from_string(field<std::string>(m, "mode"))};
  }
  return a;
}

json to_json(const Utterance& u) {
  return {{"speaker", u.speaker}, {"text", u.text}};
}

json to_json(const DialogueConfig& c) {
  const auto& m = c.monitor;
  json beliefs = json::array();
  for (const auto& a : c.initial_beliefs) beliefs.push_back(to_json(a));
  return {{"brevity_max_tokens", m.brevity_max_tokens},
          {"quantity_min_content", m.quantity_min_content},
          {"quantity_max_content", m.quantity_max_content},
          {"relevance_min", m.relevance_min},
          {"context_decay", m.context_decay},
          {"severity_interrupt", m.severity_interrupt},
          {"severity_resume", m.severity_resume},
          {"ambiguity_cap", m.ambiguity_cap},
          {"monitor_robot", m.monitor_robot},
          {"inference_sweeps", c.inference_sweeps},
          {"extract_assertions", c.extract_assertions},
          {"initial_beliefs", beliefs}};
}

DialogueConfig apply_overrides(DialogueConfig c, const json& overrides) {
  if (overrides.is_null()) {
    c.validate();
    return c;
  }
  if (!overrides.is_object()) {
    throw Error(ErrorCode::ConfigInvalid, "config overrides must be an object");
  }
  auto& m = c.monitor;
  for (const auto& [key, value] : overrides.items()) {
    auto bad_type = [&] {
      return Error(ErrorCode::ConfigInvalid, "config key '" + key +
                                                 "' has the wrong type");
    };
    auto integer = [&](int& out) {
      if (!value.is_number_integer()) throw bad_type();
      out = value.get<int>();
    };
    auto real = [&](double& out) {
      if (!value.is_number()) throw bad_type();
      out = value.get<double>();
    };
    auto boolean = [&](bool& out) {
      if (!value.is_boolean()) throw bad_type();
      out = value.get<bool>();
    };
    if (key == "brevity_max_tokens") integer(m.brevity_max_tokens);
    else if (key == "quantity_min_content") integer(m.quantity_min_content);
    else if (key == "quantity_max_content") integer(m.quantity_max_content);
    else if (key == "relevance_min") real(m.relevance_min);
    else if (key == "context_decay") real(m.context_decay);
    else if (key == "severity_interrupt") real(m.severity_interrupt);
    else if (key == "severity_resume") real(m.severity_resume);
    else if (key == "ambiguity_cap") integer(m.ambiguity_cap);
    else if (key == "monitor_robot") boolean(m.monitor_robot);
    else if (key == "inference_sweeps") integer(c.inference_sweeps);
    else if (key == "extract_assertions") boolean(c.extract_assertions);
    else if (key == "initial_beliefs") {
      if (!value.is_array()) throw bad_type();
      c.initial_beliefs.clear();
      try {
        for (const auto& a : value) c.initial_beliefs.push_back(assertion_from_json(a));
      } catch (const Error& e) {
        throw Error(ErrorCode::ConfigInvalid,
                    std::string("initial_beliefs: ") + e.what());
      }
    } else {
      throw Error(ErrorCode::ConfigInvalid, "unknown config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

json to_json(const TraceBlock& b) {
  json steps = json::array();
  for (const auto& s : b.steps) {
    steps.push_back({{"production", to_string(s.production)},
                     {"position", s.position}});
  }
  return {{"component", b.component_id},
          {"mode", to_string(b.mode)},
          {"steps", steps},
          {"result", to_string(b.result)}};
}

TraceBlock block_from_json(const json& j, const Cdgs& g) {
  TraceBlock b;
  b.component_id = field<std::string>(j, "component");
  b.mode = mode_from_string(field<std::string>(j, "mode"));
  for (const auto& s : member(j, "steps")) {
    b.steps.push_back(
        {production_from_string(field<std::string>(s, "production"), g),
         field<std::size_t>(s, "position")});
  }
  b.result = form_from_string(field<std::string>(j, "result"), g);
  return b;
}

json to_json(const Turn& t) {
  json assertions = json::array();
  for (const auto& a : t.utterance.assertions) assertions.push_back(to_json(a));
  json breaches = json::array();
  for (const auto& e : t.breaches) breaches.push_back(to_json(e));
  json reply_breaches = json::array();
  for (const auto& e : t.reply_breaches) reply_breaches.push_back(to_json(e));
  json acts = json::array();
  for (const auto& a : t.acts) acts.push_back(to_json(a));
  json blocks = json::array();
  for (const auto& b : t.blocks) blocks.push_back(to_json(b));
  json modes = json::object();
  for (const auto& [id, mode] : t.modes) modes[id] = to_string(mode);
  return {{"turnIndex", t.index},
          {"speaker", t.utterance.speaker},
          {"text", t.utterance.text},
          {"timestamp", t.utterance.timestamp},
          {"assertions", assertions},
          {"breaches", breaches},
          {"acts", acts},
          {"reply", t.reply ? to_json(*t.reply) : json(nullptr)},
          {"replyBreaches", reply_breaches},
          {"blocks", blocks},
          {"blackboard", to_string(t.blackboard)},
          {"modes", modes},
          {"contextTheta", distribution_json(t.context_theta)},
          {"topicStack", t.topic_stack},
          {"committed", t.committed}};
}

Turn turn_from_json(const json& j, const Cdgs& g) {
  Turn t;
  t.index = field<int>(j, "turnIndex");
  t.utterance.speaker = field<std::string>(j, "speaker");
  t.utterance.text = field<std::string>(j, "text");
  t.utterance.timestamp = field<std::int64_t>(j, "timestamp");
  for (const auto& a : member(j, "assertions")) {
    t.utterance.assertions.push_back(assertion_from_json(a));
  }
  for (const auto& e : member(j, "breaches")) {
    t.breaches.push_back(breach_from_json(e));
  }
  for (const auto& a : member(j, "acts")) t.acts.push_back(act_from_json(a));
  const auto& reply = member(j, "reply");
  if (!reply.is_null()) {
    t.reply = Utterance{field<std::string>(reply, "speaker"),
                        field<std::string>(reply, "text"), {},
                        t.utterance.timestamp};
  }
  for (const auto& e : member(j, "replyBreaches")) {
    t.reply_breaches.push_back(breach_from_json(e));
  }
  for (const auto& b : member(j, "blocks")) {
    t.blocks.push_back(block_from_json(b, g));
  }
  t.blackboard = form_from_string(field<std::string>(j, "blackboard"), g);
  for (const auto& [id, mode] : member(j, "modes").items()) {
    if (!mode.is_string()) throw bad_request("mode must be a string");
    t.modes.emplace(id, mode_from_string(mode.get<std::string>()));
  }
  const auto& theta = member(j, "contextTheta");
  if (!theta.is_null()) t.context_theta = field<Distribution>(j, "contextTheta");
  t.topic_stack = field<std::vector<std::size_t>>(j, "topicStack");
  t.committed = field<bool>(j, "committed");
  return t;
}

json header_json(const DialogueState& s) {
  json participants = json::array();
  for (const auto& p : s.participants) {
    participants.push_back({{"id", p.id},
                            {"role", to_string(p.role)},
                            {"component", p.component_id}});
  }
  return {{"dialogueId", s.id},
          {"configSnapshot", to_json(s.config)},
          {"grammarHash", s.grammar_hash},
          {"modelHash", s.model_hash},
          {"participants", participants}};
}

std::string serialize_trace(const DialogueState& s) {
  std::string out = header_json(s).dump() + "\n";
  for (const auto& t : s.turns) out += to_json(t).dump() + "\n";
  return out;
}

DialogueState replay_trace(std::string_view document, const Cdgs& g) {
  DialogueState s;
  std::size_t record = 0;
  std::size_t start = 0;
  bool have_header = false;
  auto corrupt = [&](const std::string& why) {
    return Error(ErrorCode::TraceCorrupt,
                 "record " + std::to_string(record) + ": " + why,
                 SourceLocation{static_cast<int>(record) + 1, 0});
  };
  while (start < document.size()) {
    std::size_t end = document.find('\n', start);
    if (end == std::string_view::npos) {
      // Every record is newline-terminated; a missing newline means the
      // writer died mid-record.
      throw corrupt("truncated record");
    }
    auto line = document.substr(start, end - start);
    start = end + 1;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw corrupt(std::string("not JSON: ") + e.what());
    }
    try {
      if (!have_header) {
        s.id = field<std::string>(j, "dialogueId");
        s.config = apply_overrides(DialogueConfig{}, member(j, "configSnapshot"));
        s.grammar_hash = field<std::string>(j, "grammarHash");
        s.model_hash = field<std::string>(j, "modelHash");
        for (const auto& p : member(j, "participants")) {
          auto role = field<std::string>(p, "role");
          if (role != "human" && role != "robot") throw bad_request("bad role");
          s.participants.push_back({field<std::string>(p, "id"),
                                    role == "human" ? Role::Human : Role::Robot,
                                    field<std::string>(p, "component"),
                                    DerivationMode::terminal()});
        }
        s.blackboard = {g.axiom()};
        for (const auto& a : s.config.initial_beliefs) s.beliefs.insert(a);
        have_header = true;
      } else {
        Turn t = turn_from_json(j, g);
        if (t.index != static_cast<int>(s.turns.size())) {
          throw corrupt("expected turn " + std::to_string(s.turns.size()));
        }
        for (const auto& b : t.blocks) {
          s.blackboard = apply_block(g.component(b.component_id),
                                     std::move(s.blackboard), b.mode, b.steps);
          if (s.blackboard != b.result) throw corrupt("block result mismatch");
        }
        if (s.blackboard != t.blackboard) throw corrupt("blackboard mismatch");
        for (auto& p : s.participants) {
          auto it = t.modes.find(p.id);
          if (it == t.modes.end()) throw corrupt("no mode for " + p.id);
          p.mode = it->second;
        }
        if (t.committed) {
          for (const auto& a : t.utterance.assertions) s.beliefs.insert(a);
        }
        s.context_theta = t.context_theta;
        s.topic_stack = t.topic_stack;
        s.turns.push_back(std::move(t));
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::TraceCorrupt) throw;
      throw corrupt(e.what());
    }
    ++record;
  }
  if (!have_header) throw corrupt("missing header");
  return s;
}

DialogueState replay_trace(std::string_view document) {
  static const Cdgs grammar = default_dialogue_grammar();
  return replay_trace(document, grammar);
}

}  // namespace grice
