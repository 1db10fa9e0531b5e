#include <fstream>
#include <sstream>

#include "grice/error.h"
#include "grice/service.h"
#include "grice/text.h"

namespace grice {

namespace {

const char* const kServerKeys[] = {
    "bind_address",  "port",           "data_dir",
    "grammar_path",  "reference_grammar_path",
    "topic_model_path", "reply_template_path",
};

bool is_server_key(const std::string& key) {
  for (const char* k : kServerKeys) {
    if (key == k) return true;
  }
  return false;
}

std::string read_file(const std::filesystem::path& path, ErrorCode code,
                      const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(code, "cannot read " + what + " " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

ServerConfig parse_server_config(const json& doc,
                                 const std::filesystem::path& base_dir) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::ConfigInvalid, "config must be a JSON object");
  }
  ServerConfig cfg;
  json dialogue_keys = json::object();
  auto path_of = [&](const std::string& key, const json& v) {
    if (!v.is_string()) {
      throw Error(ErrorCode::ConfigInvalid, "config key '" + key + "' must be a string");
    }
    std::filesystem::path p = v.get<std::string>();
    if (p.empty() || p.is_absolute()) return p;
    return base_dir / p;
  };
  for (const auto& [key, value] : doc.items()) {
    if (!is_server_key(key)) {
      dialogue_keys[key] = value;
    } else if (key == "bind_address") {
      if (!value.is_string() || value.get<std::string>().empty()) {
        throw Error(ErrorCode::ConfigInvalid, "bind_address must be a non-empty string");
      }
      cfg.bind_address = value.get<std::string>();
    } else if (key == "port") {
      if (!value.is_number_integer() || value.get<int>() < 0 ||
          value.get<int>() > 65535) {
        throw Error(ErrorCode::ConfigInvalid, "port must be an integer in [0, 65535]");
      }
      cfg.port = value.get<int>();
    } else if (key == "data_dir") {
      cfg.data_dir = path_of(key, value);
    } else if (key == "grammar_path") {
      cfg.grammar_path = path_of(key, value);
    } else if (key == "reference_grammar_path") {
      cfg.reference_grammar_path = path_of(key, value);
    } else if (key == "topic_model_path") {
      cfg.topic_model_path = path_of(key, value);
    } else if (key == "reply_template_path") {
      cfg.reply_template_path = path_of(key, value);
    }
  }
  cfg.dialogue = apply_overrides(DialogueConfig{}, dialogue_keys);
  return cfg;
}

ServerConfig load_server_config(const std::filesystem::path& path) {
  const auto text = read_file(path, ErrorCode::ConfigInvalid, "config");
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid,
                path.string() + ": " + e.what());
  }
  return parse_server_config(doc, path.parent_path());
}

DialogueModels load_models(const ServerConfig& cfg) {
  DialogueModels m;
  std::string grammar_text(default_dialogue_grammar_text());
  if (!cfg.grammar_path.empty()) {
    grammar_text = read_file(cfg.grammar_path, ErrorCode::ModelMissing,
                             "dialogue grammar");
  }
  try {
    m.grammar = std::make_shared<const Cdgs>(parse_grammar(grammar_text));
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigInvalid,
                "dialogue grammar: " + std::string(e.what()));
  }
  validate_dialogue_grammar(*m.grammar);
  m.grammar_hash = hex64(fnv1a(grammar_text));

  if (cfg.topic_model_path.empty()) {
    throw Error(ErrorCode::ModelMissing, "topic_model_path is not set");
  }
  const auto model_text =
      read_file(cfg.topic_model_path, ErrorCode::ModelMissing, "topic model");
  m.topics = std::make_shared<const TopicModel>(parse_topic_model(model_text));
  m.model_hash = hex64(fnv1a(model_text));

  if (!cfg.reference_grammar_path.empty()) {
    const auto text = read_file(cfg.reference_grammar_path,
                                ErrorCode::ModelMissing, "reference grammar");
    try {
      m.reference = std::make_shared<const ContextFreeGrammar>(
          parse_grammar(text).merged());
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigInvalid,
                  "reference grammar: " + std::string(e.what()));
    }
    if (!m.reference->is_epsilon_free()) {
      throw Error(ErrorCode::ConfigInvalid, "reference grammar has erasing rules");
    }
  }
  if (!cfg.reply_template_path.empty()) {
    m.templates = ReplyTemplates::load(cfg.reply_template_path);
  }
  return m;
}

}  // namespace grice
