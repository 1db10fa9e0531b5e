#include <fstream>
#include <sstream>

#include "grice/dialogue.h"
#include "grice/error.h"
#include "json.hpp"

namespace grice {

namespace {

// Mirrors resources/reply_templates.json.
constexpr std::string_view kDefaultTemplates = R"json({
  "Acknowledge": [
    "I see. Please go on about {topic}.",
    "Understood. What else can you say about {topic}?"
  ],
  "AskForMore": [
    "Could you tell me more about {slot}?"
  ],
  "Interrupt": [
    "Sorry to interrupt. Could you keep it short and tell me what matters most about {topic}?"
  ],
  "FollowNewTopic": [
    "Interesting, let us talk about {topic} then."
  ],
  "ResumePreviousTopic": [
    "Let us get back to {topic}."
  ],
  "Clarify": [
    "I am not sure I follow. Do you mean {slot}?"
  ],
  "Challenge": [
    "How do you know that {slot}?"
  ],
  "Goodbye": [
    "Goodbye, it was nice talking with you."
  ]
}
)json";

const char* const kRequired[] = {
    "Acknowledge", "AskForMore", "Interrupt", "FollowNewTopic",
    "ResumePreviousTopic", "Clarify", "Challenge", "Goodbye",
};

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t at = s.find(from); at != std::string::npos;
       at = s.find(from, at + to.size())) {
    s.replace(at, from.size(), to);
  }
}

}  // namespace

std::string_view ReplyTemplates::default_json() { return kDefaultTemplates; }

ReplyTemplates ReplyTemplates::defaults() { return parse(kDefaultTemplates); }

ReplyTemplates ReplyTemplates::parse(std::string_view json_text) {
  ReplyTemplates t;
  try {
    auto doc = nlohmann::json::parse(json_text);
    t.by_key_ = doc.get<std::map<std::string, std::vector<std::string>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid,
                std::string("reply templates: ") + e.what());
  }
  for (const char* key : kRequired) {
    auto it = t.by_key_.find(key);
    if (it == t.by_key_.end() || it->second.empty()) {
      throw Error(ErrorCode::ConfigInvalid,
                  std::string("reply templates: no entry for ") + key);
    }
  }
  return t;
}

ReplyTemplates ReplyTemplates::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::ConfigInvalid,
                "cannot read reply templates " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string ReplyTemplates::render(std::string_view key, std::size_t variant,
                                   std::string_view topic,
                                   std::string_view slot) const {
  const auto& options = by_key_.at(std::string(key));
  std::string out = options[variant % options.size()];
  replace_all(out, "{topic}", topic);
  replace_all(out, "{slot}", slot);
  return out;
}

}  // namespace grice
