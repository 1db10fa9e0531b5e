#include <string>

#include "doctest.h"
#include "grice/error.h"
#include "grice/json_codec.h"
#include "grice/service.h"
#include "harness.h"
#include "schema.h"

using namespace grice;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

DialogueState audited(const std::string& fixture) {
  return audit_transcript(load_transcript(harness::fixture(fixture)),
                          harness::test_config().dialogue, harness::test_models())
      .state;
}

std::vector<std::string> lines_of(const std::string& doc) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < doc.size()) {
    auto nl = doc.find('\n', start);
    out.push_back(doc.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

}  // namespace

TEST_SUITE("codec") {

TEST_CASE("empty dialogue round trips") {
  const auto s = new_dialogue("empty", {}, harness::test_models());
  const auto doc = serialize_trace(s);
  CHECK(lines_of(doc).size() == 1);
  CHECK(replay_trace(doc) == s);
}

TEST_CASE("fixture traces round trip and match the schemas") {
  for (const char* f : {"clean.json", "offtopic.json", "rambling.json"}) {
    const auto s = audited(f);
    const auto doc = serialize_trace(s);
    CHECK(replay_trace(doc) == s);
    CHECK(serialize_trace(replay_trace(doc)) == doc);
    const auto lines = lines_of(doc);
    CHECK(schema::validate(schema::load("trace_header.schema.json"),
                           json::parse(lines[0])).empty());
    for (std::size_t i = 1; i < lines.size(); ++i) {
      CHECK(schema::validate(schema::load("trace_turn.schema.json"),
                             json::parse(lines[i])).empty());
    }
  }
}

TEST_CASE("corrupt traces name the record") {
  const auto doc = serialize_trace(audited("clean.json"));
  auto lines = lines_of(doc);
  auto corrupt_at = [&](const std::string& text) -> std::string {
    try {
      replay_trace(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TraceCorrupt);
      return e.what();
    }
    return "accepted";
  };
  CHECK(corrupt_at(doc.substr(0, doc.size() / 2)) != "accepted");
  CHECK(corrupt_at("") != "accepted");

  auto bad = json::parse(lines[2]);
  bad["blackboard"] = "D";
  std::string edited;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    edited += (i == 2 ? bad.dump() : lines[i]) + "\n";
  }
  CHECK(corrupt_at(edited).find("record 2") != std::string::npos);
}

TEST_CASE("config overrides") {
  const DialogueConfig base;
  auto c = apply_overrides(base, {{"relevance_min", 0.3}, {"brevity_max_tokens", 12}});
  CHECK(c.monitor.relevance_min == 0.3);
  CHECK(c.monitor.brevity_max_tokens == 12);
  CHECK(apply_overrides(base, nullptr) == base);
  CHECK(apply_overrides(base, to_json(c)) == c);
  CHECK(code_of([&] { apply_overrides(base, {{"nope", 1}}); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([&] { apply_overrides(base, {{"relevance_min", "x"}}); }) ==
        ErrorCode::ConfigInvalid);
  CHECK(code_of([&] { apply_overrides(base, {{"relevance_min", 1.5}}); }) ==
        ErrorCode::ConfigInvalid);
}

TEST_CASE("server config files") {
  const auto cfg = harness::test_config();
  CHECK(cfg.port == 0);
  CHECK(cfg.topic_model_path.is_absolute());
  CHECK(schema::validate(schema::load("server_config.schema.json"),
                         json::parse(harness::read_file(harness::fixture("test_config.json"))))
            .empty());
  CHECK(code_of([] { parse_server_config({{"port", "x"}}, "/"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { parse_server_config({{"colour", 1}}, "/"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { load_models(ServerConfig{}); }) == ErrorCode::ModelMissing);
  ServerConfig missing;
  missing.topic_model_path = "/nonexistent/model.json";
  CHECK(code_of([&] { load_models(missing); }) == ErrorCode::ModelMissing);
}

TEST_CASE("transcripts") {
  auto t = parse_transcript(
      "# comment\n"
      "{\"dialogueId\": \"x\", \"config\": {\"brevity_max_tokens\": 10}}\n"
      "\n"
      "{\"speaker\": \"human\", \"text\": \"hi\"}\n");
  CHECK(t.dialogue_id == "x");
  CHECK(t.config["brevity_max_tokens"] == 10);
  REQUIRE(t.turns.size() == 1);
  CHECK(t.turns[0].text == "hi");

  try {
    parse_transcript("{\"speaker\": \"human\", \"text\": \"hi\"}\n\n{not json\n");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TranscriptMalformed);
    REQUIRE(e.where());
    CHECK(e.where()->line == 3);
  }
  CHECK(code_of([] { parse_transcript("{\"speaker\": \"human\"}\n"); }) ==
        ErrorCode::TranscriptMalformed);
  for (const auto& line : lines_of(harness::read_file(harness::fixture("clean.json")))) {
    auto j = json::parse(line);
    if (j.contains("speaker")) {
      CHECK(schema::validate(schema::load("transcript_turn.schema.json"), j).empty());
    }
  }
}

TEST_CASE("audit reports") {
  const auto transcript = load_transcript(harness::fixture("offtopic.json"));
  const auto report = audit_transcript(transcript, harness::test_config().dialogue,
                                       harness::test_models());
  const auto j = report.to_json();
  CHECK(j["dialogueId"] == "offtopic");
  CHECK(j["totalBreaches"] == 1);
  CHECK(schema::validate(schema::load("breach_report.schema.json"), j).empty());
  CHECK(report.to_text().find("OffTopic") != std::string::npos);

  Transcript anon = transcript;
  anon.dialogue_id.reset();
  CHECK(audit_transcript(anon, {}, harness::test_models()).state.id == kAuditDialogueId);
}

TEST_CASE("shipped model and template files match their schemas") {
  CHECK(schema::validate(schema::load("topic_model.schema.json"),
                         json::parse(harness::read_file(harness::fixture("topic_model.json"))))
            .empty());
  CHECK(schema::validate(schema::load("reply_templates.schema.json"),
                         json::parse(harness::read_file(harness::resource("reply_templates.json"))))
            .empty());
}

}  // TEST_SUITE
