#include <fstream>
#include <string>

#include "doctest.h"
#include "grice/topics.h"
#include "harness.h"
#include "json.hpp"
#include "oracles.h"

using harness::run_cli;

namespace {

std::string grammar(const std::string& name) {
  return harness::fixture("grammars/" + name + ".cdgs").string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("grammar enumerate and member") {
  auto r = run_cli({"grammar", "enumerate", "--grammar", grammar("classic"), "--mode", "t",
                    "--max-len", "9"});
  CHECK(r.code == 0);
  CHECK(r.out == "abc\naabbcc\naaabbbccc\n");

  r = run_cli({"grammar", "member", "--grammar", grammar("classic"), "--word", "aabbcc"});
  CHECK(r.code == 0);
  CHECK(r.out.find("P3") != std::string::npos);

  r = run_cli({"grammar", "member", "--grammar", grammar("classic"), "--word", "aabbc"});
  CHECK(r.code == 1);

  r = run_cli({"grammar", "count", "--grammar", grammar("catalan"), "--word", "aaaa",
               "--cap", "3"});
  CHECK(r.code == 0);
  CHECK(r.out == "3 (saturated)\n");

  r = run_cli({"grammar", "derive", "--grammar", grammar("classic"), "--component", "P2",
               "--form", "AB", "--mode", "t"});
  CHECK(r.code == 0);
  CHECK(r.out == "P2: aA'bcB'\n");
}

TEST_CASE("grammar errors") {
  harness::TempDir dir;
  const auto bad = dir.path() / "bad.cdgs";
  harness::write_file(bad, "nonterminals: S\nterminals: a\naxiom: S\ncomponent c:\n  S -> a Z\n");
  auto r = run_cli({"grammar", "enumerate", "--grammar", bad.string(), "--max-len", "3"});
  CHECK(r.code == 65);
  CHECK(r.err.find("line 5") != std::string::npos);

  CHECK(run_cli({"grammar", "enumerate", "--bogus"}).code == 64);
  CHECK(run_cli({"grammar", "enumerate", "--grammar", grammar("classic"), "--mode", "??",
                 "--max-len", "3"}).code == 64);
  CHECK(run_cli({}).code == 64);
}

TEST_CASE("lda train and infer") {
  harness::TempDir dir;
  const auto truth = oracle::synthetic_corpus(5, 2, 200, 30, 10, 0.5);
  std::string text;
  for (const auto& l : truth.lines) text += l + "\n";
  const auto corpus = dir.path() / "corpus.txt";
  harness::write_file(corpus, text);
  const auto a = dir.path() / "a.json", b = dir.path() / "b.json";
  for (const auto& out : {a, b}) {
    auto r = run_cli({"lda", "train", "--corpus", corpus.string(), "--out", out.string(),
                      "--topics", "2", "--seed", "7"});
    REQUIRE(r.code == 0);
  }
  CHECK(harness::read_file(a) == harness::read_file(b));

  const auto model = grice::load_topic_model(a);
  const auto w = *model.vocabulary.find("t0w0");
  const std::size_t recovered = model.phi[0][w] > model.phi[1][w] ? 0 : 1;
  auto r = run_cli({"lda", "infer", "--model", a.string(), "--text",
                    "t0w0 t0w1 t0w2 t0w3 t0w4 t0w5 t0w1 t0w2", "--seed", "3"});
  REQUIRE(r.code == 0);
  const auto theta = nlohmann::json::parse(r.out).get<std::vector<double>>();
  CHECK(grice::argmax(theta) == recovered);

  const auto empty = dir.path() / "empty.txt";
  harness::write_file(empty, "");
  CHECK(run_cli({"lda", "train", "--corpus", empty.string(), "--out",
                 (dir.path() / "c.json").string()}).code == 65);
  CHECK(run_cli({"lda", "infer", "--model", a.string(), "--text", "zzz qqq"}).code == 65);
}

TEST_CASE("audit") {
  const auto cfg = harness::fixture("test_config.json").string();
  auto r = run_cli({"audit", harness::fixture("offtopic.json").string(), "--config", cfg});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["totalBreaches"] == 1);

  r = run_cli({"audit", harness::fixture("rambling.json").string(), "--config", cfg,
               "--format", "text"});
  CHECK(r.code == 0);
  CHECK(r.out.find("TooLong") != std::string::npos);

  harness::TempDir dir;
  const auto broken = dir.path() / "broken.json";
  harness::write_file(broken, "{\"speaker\": \"human\", \"text\": \"hi\"}\n[1,\n");
  r = run_cli({"audit", broken.string(), "--config", cfg});
  CHECK(r.code == 65);
  CHECK(r.err.find(":2:") != std::string::npos);

  const auto bad_cfg = dir.path() / "cfg.json";
  harness::write_file(bad_cfg, "{\"topic_model_path\": \"missing.json\"}");
  CHECK(run_cli({"audit", harness::fixture("clean.json").string(), "--config",
                 bad_cfg.string()}).code == 2);
}

TEST_CASE("serve startup failure") {
  harness::TempDir dir;
  const auto bad_cfg = dir.path() / "cfg.json";
  harness::write_file(bad_cfg, "{\"port\": \"eighty\"}");
  CHECK(run_cli({"serve", "--config", bad_cfg.string()}).code == 2);
}

TEST_CASE("serve survives a hard kill") {
  harness::TempDir dir;
  const auto cfg = harness::fixture("test_config.json");
  std::string id;
  {
    harness::ServerProcess server(cfg, dir.path());
    auto c = harness::http_post(server.port(), "/v1/dialogues", nlohmann::json::object());
    REQUIRE(c.status == 201);
    id = c.body["id"];
    auto t = harness::http_post(server.port(), "/v1/dialogues/" + id + "/turns",
                                {{"speaker", "human"}, {"text", "We bake bread with yeast."}});
    REQUIRE(t.status == 200);
    server.kill_hard();
  }
  harness::ServerProcess again(cfg, dir.path());
  auto g = harness::http_get(again.port(), "/v1/dialogues/" + id);
  CHECK(g.status == 200);
  CHECK(g.body["turns"].size() == 1);
}

}  // TEST_SUITE
