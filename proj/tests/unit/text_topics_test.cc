#include <cmath>
#include <string>

#include "doctest.h"
#include "grice/error.h"
#include "grice/text.h"
#include "grice/topics.h"
#include "harness.h"
#include "oracles.h"

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

double sum(const Distribution& d) {
  double s = 0;
  for (double x : d) s += x;
  return s;
}

}  // namespace

TEST_SUITE("text") {

TEST_CASE("tokenizer") {
  CHECK(tokenize_words("Hello, World! It's 2 o'clock.") ==
        std::vector<std::string>{"hello", "world", "it", "s", "2", "o", "clock"});
  CHECK(tokenize_words("  \t\n").empty());
}

TEST_CASE("content words drop stopwords and single characters") {
  CHECK(is_stopword("the"));
  CHECK_FALSE(is_stopword("bread"));
  CHECK(content_words("The bread and a b of yeast") ==
        std::vector<std::string>{"bread", "yeast"});
  const auto sw = stopwords();
  CHECK(std::is_sorted(sw.begin(), sw.end()));
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(hex64(0xabcull) == "0000000000000abc");
}

}  // TEST_SUITE

TEST_SUITE("topics") {

TEST_CASE("one topic is forced") {
  const std::vector<std::string> lines = {"bread yeast flour", "bread salt"};
  const auto corpus = Corpus::from_lines(lines);
  LdaConfig cfg;
  cfg.topics = 1;
  cfg.sweeps = 20;
  cfg.burn_in = 5;
  const auto m = train(corpus, cfg);
  for (const auto& t : m.theta_train) CHECK(t == Distribution{1.0});
  // Smoothed frequencies: bread 2, yeast 1, flour 1, salt 1 of N = 5.
  const double denom = 5 + 4 * cfg.beta;
  CHECK(m.phi[0][*m.vocabulary.find("bread")] == doctest::Approx((2 + cfg.beta) / denom));
  CHECK(m.phi[0][*m.vocabulary.find("salt")] == doctest::Approx((1 + cfg.beta) / denom));
  CHECK(infer_words(m, std::vector<std::string>{"bread"}, 10, 3) == Distribution{1.0});
}

TEST_CASE("training is deterministic and normalized") {
  const auto truth = oracle::synthetic_corpus(11, 2, 60, 20, 10, 0.5);
  const auto corpus = Corpus::from_lines(truth.lines);
  LdaConfig cfg;
  cfg.sweeps = 100;
  cfg.burn_in = 50;
  cfg.seed = 9;
  const auto a = train(corpus, cfg);
  const auto b = train(corpus, cfg);
  CHECK(a == b);
  for (const auto& row : a.phi) CHECK(sum(row) == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& row : a.theta_train) CHECK(sum(row) == doctest::Approx(1.0).epsilon(1e-9));

  const auto th = infer(a, corpus.documents[0], 30, 4);
  CHECK(th == infer(a, corpus.documents[0], 30, 4));
  CHECK(sum(th) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("errors") {
  CHECK(code_of([] { train(Corpus{}, LdaConfig{}); }) == ErrorCode::EmptyCorpus);
  const std::vector<std::string> lines = {"bread yeast"};
  const auto m = train(Corpus::from_lines(lines), LdaConfig{1, 0.5, 0.01, 10, 2, 1});
  CHECK(code_of([&] { infer_words(m, std::vector<std::string>{"comet"}, 10, 1); }) ==
        ErrorCode::EmptyAfterFiltering);
  LdaConfig bad;
  bad.topics = 0;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::ConfigInvalid);
  bad = LdaConfig{};
  bad.burn_in = bad.sweeps;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("similarity") {
  const Distribution p = {0.9, 0.1}, q = {0.1, 0.9};
  CHECK(similarity(p, p) == doctest::Approx(1.0));
  CHECK(similarity(Distribution{1, 0}, Distribution{0, 1}) == doctest::Approx(0.0));
  CHECK(similarity(p, q) == doctest::Approx(1 - oracle::hellinger(p, q)));
  CHECK(similarity(p, q) == doctest::Approx(0.3675).epsilon(1e-3));
  CHECK(similarity(p, q) == similarity(q, p));
  CHECK(code_of([&] { similarity(p, Distribution{1.0}); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { similarity(p, Distribution{0.5, 0.6}); }) == ErrorCode::NotNormalized);
  CHECK(argmax(Distribution{0.4, 0.4, 0.2}) == 0);
}

TEST_CASE("model files round trip") {
  const auto m = load_topic_model(harness::fixture("topic_model.json"));
  CHECK(parse_topic_model(dump_topic_model(m)) == m);
  CHECK(dump_topic_model(parse_topic_model(dump_topic_model(m))) == dump_topic_model(m));
  CHECK_THROWS_AS(parse_topic_model("{}"), Error);
  CHECK_FALSE(m.top_words(0, 5).empty());
}

}  // TEST_SUITE
