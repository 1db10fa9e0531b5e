// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "grice/error.h"
#include "grice/service.h"
#include "grice/text.h"
#include "harness.h"
#include "oracles.h"

namespace {

using grice::DerivationMode;
using Failure = std::optional<std::string>;
using Clock = std::chrono::steady_clock;

// Extra detail for the criterion's result line.
std::string g_note;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::set<oracle::Word> engine_words(const grice::Language& lang) {
  std::set<oracle::Word> out;
  for (const auto& w : lang.words) {
    oracle::Word v;
    for (const auto& s : w) v.push_back(s.name);
    out.insert(v);
  }
  return out;
}

std::string show(const std::set<oracle::Word>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ",";
    for (const auto& s : w) out += s;
  }
  return "{" + out + "}";
}

grice::Cdgs corpus_grammar(const std::string& name) {
  return grice::load_grammar_file(harness::fixture("grammars/" + name + ".cdgs"));
}

const std::vector<std::string> kCorpus = {"classic", "anbn",  "catalan", "expr",
                                          "chain",   "pair",  "counter", "shared"};

// Enough total rewrites for any word of max_len in the corpus grammars.
constexpr int kStepBudget = 400;

Failure classic_system() {
  const auto t0 = Clock::now();
  const auto g = corpus_grammar("classic");
  const grice::ModeAssignment t(DerivationMode::terminal());
  auto lang = grice::enumerate_language(g, t, 9, kStepBudget);
  std::vector<std::string> got;
  for (const auto& w : lang.sorted()) got.push_back(grice::to_string(w));
  const std::vector<std::string> want = {"abc", "aabbcc", "aaabbbccc"};
  if (got != want || lang.truncated) return "maxLen 9 gives " + show(engine_words(lang));
  for (std::size_t n = 1; n <= 12; ++n) {
    auto e = grice::enumerate_language(g, t, n, kStepBudget);
    auto o = oracle::cdgs_language(g, t, n);
    if (e.truncated) return "truncated at maxLen " + std::to_string(n);
    if (engine_words(e) != o) {
      return "maxLen " + std::to_string(n) + ": engine " + show(engine_words(e)) +
             " oracle " + show(o);
    }
  }
  if (seconds_since(t0) >= 5) return "took " + std::to_string(seconds_since(t0)) + " s";
  return std::nullopt;
}

Failure mode_semantics() {
  const auto t0 = Clock::now();
  const std::vector<DerivationMode> modes = {
      DerivationMode::star(),       DerivationMode::terminal(),
      DerivationMode::exactly(1),   DerivationMode::exactly(2),
      DerivationMode::at_most(1),   DerivationMode::at_most(2),
      DerivationMode::at_least(1),  DerivationMode::at_least(2),
      DerivationMode::at_least(3),
  };
  int cases = 0;
  for (const auto& name : kCorpus) {
    const auto g = corpus_grammar(name);
    for (const auto& m : modes) {
      const grice::ModeAssignment assignment(m);
      auto e = grice::enumerate_language(g, assignment, 10, kStepBudget);
      auto o = oracle::cdgs_language(g, assignment, 10);
      if (e.truncated) return name + " " + grice::to_string(m) + ": truncated";
      if (engine_words(e) != o) {
        return name + " " + grice::to_string(m) + ": engine " +
               show(engine_words(e)) + " oracle " + show(o);
      }
      ++cases;
    }
    if (g.components().size() == 1) {
      auto e = grice::enumerate_language(
          g, grice::ModeAssignment(DerivationMode::star()), 10, kStepBudget);
      if (engine_words(e) != oracle::cf_language(g.merged(), 10)) {
        return name + ": Star mode differs from plain context-free generation";
      }
    }
  }
  // Mixed assignments: each component of the classic system in its own mode.
  const auto classic = corpus_grammar("classic");
  for (const auto& m1 : modes) {
    for (const auto& m2 : modes) {
      grice::ModeAssignment a(DerivationMode::terminal());
      a.set("P1", m1);
      a.set("P2", m2);
      auto e = grice::enumerate_language(classic, a, 10, kStepBudget);
      if (e.truncated || engine_words(e) != oracle::cdgs_language(classic, a, 10)) {
        return "classic with P1 " + grice::to_string(m1) + ", P2 " +
               grice::to_string(m2) + " differs from the oracle";
      }
      ++cases;
    }
  }
  if (seconds_since(t0) >= 30) return "took " + std::to_string(seconds_since(t0)) + " s";
  g_note = std::to_string(cases) + " grammar/mode cases";
  return std::nullopt;
}

Failure parse_count() {
  std::size_t words = 0;
  for (const auto& name : kCorpus) {
    const auto cf = corpus_grammar(name).merged();
    for (const auto& w : oracle::all_words(cf, 6)) {
      const auto got = grice::count_parse_trees(cf, w, std::uint64_t{1} << 62);
      const auto want = oracle::count_trees(cf, w);
      if (got != want) {
        std::string s;
        for (const auto& x : w) s += x;
        return name + " '" + s + "': " + std::to_string(got) + " trees, oracle " +
               std::to_string(want);
      }
      ++words;
    }
  }
  const auto catalan = corpus_grammar("catalan").merged();
  const std::uint64_t want[] = {1, 2, 5};
  for (std::size_t n = 2; n <= 4; ++n) {
    const std::vector<std::string> w(n, "a");
    if (grice::count_parse_trees(catalan, w, 1000) != want[n - 2]) {
      return "Catalan count wrong at length " + std::to_string(n);
    }
  }
  g_note = std::to_string(words) + " words checked";
  return std::nullopt;
}

Failure lda_recovery() {
  const auto t0 = Clock::now();
  int good = 0;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto truth = oracle::synthetic_corpus(seed, 2, 200, 30, 10, 0.5);
    const auto corpus = grice::Corpus::from_lines(truth.lines);
    grice::LdaConfig cfg;
    cfg.topics = 2;
    cfg.sweeps = 500;
    cfg.burn_in = 250;
    cfg.seed = seed;
    const auto model = grice::train(corpus, cfg);
    for (const auto* rows : {&model.phi, &model.theta_train}) {
      for (const auto& row : *rows) {
        double sum = 0;
        for (double x : row) {
          if (x < 0) return "negative probability";
          sum += x;
        }
        if (std::abs(sum - 1) > 1e-9) return "row sums to " + std::to_string(sum);
      }
    }
    const double d = oracle::matched_topic_distance(truth, model.phi,
                                                    model.vocabulary.tokens());
    worst = std::max(worst, d);
    if (d <= 0.2) ++good;
    if (seed <= 3 && grice::dump_topic_model(grice::train(corpus, cfg)) !=
                         grice::dump_topic_model(model)) {
      return "same-seed runs differ (seed " + std::to_string(seed) + ")";
    }
  }
  g_note = std::to_string(good) + "/100 seeds within 0.2, worst " +
           std::to_string(worst);
  if (good < 95) return std::to_string(good) + "/100 seeds recovered";
  if (seconds_since(t0) >= 60) return "took " + std::to_string(seconds_since(t0)) + " s";
  return std::nullopt;
}

Failure detector_bands() {
  std::mt19937_64 rng(20240611);
  auto uni = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto real = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto in_unit = [](double s) { return s >= 0 && s <= 1; };
  const int kCases = 20000;
  for (int i = 0; i < kCases; ++i) {
    grice::MonitorConfig cfg;
    cfg.brevity_max_tokens = uni(1, 100);
    cfg.quantity_min_content = uni(1, 50);
    cfg.quantity_max_content = uni(cfg.quantity_min_content + 1, 150);
    cfg.relevance_min = real(0.01, 0.99);
    cfg.context_decay = real(0.01, 0.99);
    cfg.ambiguity_cap = uni(2, 64);

    // Brevity: silent up to the limit, then bounded and nondecreasing.
    const auto n = static_cast<std::size_t>(uni(0, 400));
    auto b = grice::check_brevity(n, cfg);
    auto b1 = grice::check_brevity(n + 1, cfg);
    if (n <= static_cast<std::size_t>(cfg.brevity_max_tokens) && b) return "brevity fired in band";
    if (n > static_cast<std::size_t>(cfg.brevity_max_tokens) && !b) return "brevity silent above limit";
    if (b && !in_unit(b->severity)) return "brevity severity out of range";
    if (b && (!b1 || b1->severity < b->severity)) return "brevity not monotone";

    // Quantity: silent inside [q_min, q_max]; TooSparse nonincreasing.
    const auto c = static_cast<std::size_t>(uni(0, 300));
    auto q = grice::check_quantity(c, cfg);
    const bool in_band = c >= static_cast<std::size_t>(cfg.quantity_min_content) &&
                         c <= static_cast<std::size_t>(cfg.quantity_max_content);
    if (in_band && q) return "quantity fired in band";
    if (!in_band && !q) return "quantity silent outside band";
    if (q && !in_unit(q->severity)) return "quantity severity out of range";
    if (q && q->kind == grice::BreachKind::TooSparse) {
      auto q1 = grice::check_quantity(c + 1, cfg);
      if (q1 && q1->severity > q->severity) return "TooSparse not nonincreasing";
    }
    if (q && q->kind == grice::BreachKind::TooDetailed) {
      auto q1 = grice::check_quantity(c + 1, cfg);
      if (!q1 || q1->severity < q->severity) return "TooDetailed not nondecreasing";
    }

    // Relevance: random distributions; silent iff score >= r_min, severity
    // nonincreasing in the score.
    const int k = uni(2, 6);
    auto dist = [&] {
      std::vector<double> p(k);
      double s = 0;
      for (auto& x : p) s += (x = real(0.0, 1.0) + 1e-12);
      for (auto& x : p) x /= s;
      return p;
    };
    const auto turn = dist(), ctx = dist(), turn2 = dist();
    auto r = grice::check_relevance(turn, ctx, cfg);
    const double score = 1 - oracle::hellinger(turn, ctx);
    if (score >= cfg.relevance_min + 1e-12 && r.breach) return "relevance fired in band";
    if (score < cfg.relevance_min - 1e-12 && !r.breach) return "relevance silent below threshold";
    if (r.breach && !in_unit(r.breach->severity)) return "relevance severity out of range";
    double sum = 0;
    for (std::size_t j = 0; j < r.context.size(); ++j) {
      const double want = cfg.context_decay * ctx[j] + (1 - cfg.context_decay) * turn[j];
      sum += r.context[j];
      if (std::abs(r.context[j] - want) > 1e-9) return "context update wrong";
    }
    if (std::abs(sum - 1) > 1e-9) return "context not normalized";
    auto r2 = grice::check_relevance(turn2, ctx, cfg);
    const double score2 = 1 - oracle::hellinger(turn2, ctx);
    const double s1 = r.breach ? r.breach->severity : 0;
    const double s2 = r2.breach ? r2.breach->severity : 0;
    if (score2 > score + 1e-12 && s2 > s1 + 1e-12) return "relevance severity not monotone";

    // Ambiguity over {S -> S S, S -> a}: Catalan counts, silent at one tree.
    static const auto catalan = corpus_grammar("catalan").merged();
    const int len = uni(1, 8);
    const std::vector<std::string> word(static_cast<std::size_t>(len), "a");
    auto a = grice::check_ambiguity(word, catalan, cfg);
    if (len <= 2 && a) return "ambiguity fired on a single tree";
    if (len > 2 && (!a || !in_unit(a->severity))) return "ambiguity missing or out of range";

    // Quality: supported and hedged assertions never fire.
    grice::BeliefStore store;
    grice::Assertion held{"s" + std::to_string(uni(0, 5)), "p", "o", grice::Polarity::Affirmed, false};
    store.insert(held);
    grice::Assertion hedged{"x" + std::to_string(uni(0, 5)), "p", "o",
                            uni(0, 1) ? grice::Polarity::Affirmed : grice::Polarity::Denied, true};
    std::vector<grice::Assertion> fine = {held, hedged};
    const auto before = store;
    if (!grice::check_quality(fine, store).empty()) return "quality fired on supported/hedged";
    if (!(store == before)) return "quality check modified the store";
  }
  g_note = std::to_string(kCases) + " random cases";
  return std::nullopt;
}

Failure policy_totality() {
  const double grid[] = {0, 0.25, 0.49, 0.5, 0.51, 0.75, 1.0};
  const grice::MonitorConfig cfg;  // both thresholds 0.5
  const grice::ModeSwitch human_one{"human", DerivationMode::at_most(1)};
  using grice::ActTag;
  using grice::BreachKind;
  int rows = 0;
  for (auto kind : grice::kAllBreachKinds) {
    for (double s : grid) {
      std::vector<grice::RecoveryAct> want;
      switch (kind) {
        case BreachKind::TooSparse: want = {{ActTag::AskForMore, 0, {}}}; break;
        case BreachKind::TooDetailed: want = {{ActTag::Interrupt, 0, human_one}}; break;
        case BreachKind::Unsupported: want = {{ActTag::Challenge, 0, {}}}; break;
        case BreachKind::Contradiction: want = {{ActTag::Clarify, 0, {}}}; break;
        case BreachKind::OffTopic:
          want = {{s < 0.5 ? ActTag::FollowNewTopic : ActTag::ResumePreviousTopic, 0, {}}};
          break;
        case BreachKind::TooLong:
          if (s >= 0.5) want = {{ActTag::Interrupt, 0, human_one}};
          break;
        case BreachKind::Ambiguous: want = {{ActTag::Clarify, 0, {}}}; break;
      }
      grice::BreachEvent e;
      e.kind = kind;
      e.maxim = grice::maxim_of(kind);
      e.severity = s;
      const std::vector<grice::BreachEvent> one = {e};
      if (grice::decide_acts(one, cfg) != want) {
        return std::string(grice::to_string(kind)) + " at " + std::to_string(s);
      }
      ++rows;
    }
  }
  g_note = std::to_string(rows) + " rows";
  return std::nullopt;
}

grice::BreachReport audit_fixture(const std::string& name) {
  return grice::audit_transcript(
      grice::load_transcript(harness::fixture(name + ".json")),
      harness::test_config().dialogue, harness::test_models());
}

Failure fixture_audits() {
  const auto clean = audit_fixture("clean");
  for (const auto& t : clean.state.turns) {
    if (!t.breaches.empty()) return "clean.json: breach at turn " + std::to_string(t.index);
  }
  const auto off = audit_fixture("offtopic");
  int total = 0;
  for (const auto& t : off.state.turns) total += static_cast<int>(t.breaches.size());
  const auto& t4 = off.state.turns.at(4).breaches;
  if (total != 1 || t4.size() != 1 || t4[0].kind != grice::BreachKind::OffTopic) {
    return "offtopic.json: expected exactly one OffTopic at turn 4";
  }
  // The recorded similarity agrees with an independent Hellinger computation.
  const auto& p = t4[0].payload;
  const double sim = 1 - oracle::hellinger(p["turnTheta"].get<std::vector<double>>(),
                                           p["context"].get<std::vector<double>>());
  if (std::abs(sim - p["similarity"].get<double>()) > 1e-12) return "offtopic similarity mismatch";

  const auto ram = audit_fixture("rambling");
  bool too_long = false, too_detailed = false;
  for (const auto& e : ram.state.turns.at(2).breaches) {
    too_long = too_long || (e.kind == grice::BreachKind::TooLong && e.severity == 1.0);
    too_detailed = too_detailed || e.kind == grice::BreachKind::TooDetailed;
  }
  if (!too_long || !too_detailed) return "rambling.json: turn 2 lacks TooLong 1.0 / TooDetailed";

  for (const auto* name : {"clean", "offtopic", "rambling"}) {
    const auto path = harness::fixture(std::string(name) + ".json").string();
    const auto cfg = harness::fixture("test_config.json").string();
    auto a = harness::run_cli({"audit", path, "--config", cfg});
    auto b = harness::run_cli({"audit", path, "--config", cfg});
    if (a.code != 0 || a.out.empty()) return std::string(name) + ": audit exited " + std::to_string(a.code);
    if (a.out != b.out) return std::string(name) + ": report bytes differ across runs";
    if (a.out != audit_fixture(name).to_json().dump(2) + "\n") {
      return std::string(name) + ": CLI report differs from library report";
    }
  }
  return std::nullopt;
}

Failure interrupt_containment() {
  const auto report = audit_fixture("rambling");
  const auto& turns = report.state.turns;
  const auto& t2 = turns.at(2);
  bool detailed = false;
  for (const auto& e : t2.breaches) detailed = detailed || e.kind == grice::BreachKind::TooDetailed;
  if (!detailed) return "turn 2 has no TooDetailed breach";
  if (t2.modes.at("human") != DerivationMode::at_most(1)) return "human not switched to <=1";
  const auto& t3 = turns.at(3);
  if (grice::classify_acts(t3.utterance.text).size() < 2) return "turn 3 should offer several acts";
  const auto& block = t3.blocks.at(0);
  if (block.component_id != "human" || block.mode != DerivationMode::at_most(1) ||
      block.steps.size() != 1) {
    return "turn 3 human block is not a single <=1 step";
  }
  auto grown = [&](const grice::Turn& before, const grice::Turn& after) {
    return after.blocks.at(0).result.size() - before.blackboard.size();
  };
  if (grown(t2, t3) != 1) return "turn 3 appended more than one act symbol";
  if (t3.modes.at("human") != DerivationMode::terminal()) return "mode did not revert to t";
  const auto& t4 = turns.at(4);
  if (t4.blocks.at(0).mode != DerivationMode::terminal() || grown(t3, t4) < 2) {
    return "turn 4 is not back in t-mode";
  }
  const auto& g = *harness::test_models().grammar;
  if (grice::replay_blackboard(report.state, g) != report.state.blackboard) {
    return "blackboard replay disagrees";
  }
  return std::nullopt;
}

Failure service_equivalence() {
  for (const auto* name : {"clean", "offtopic", "rambling"}) {
    const auto transcript = grice::load_transcript(harness::fixture(std::string(name) + ".json"));
    const auto report = audit_fixture(name).to_json();
    harness::TempDir dir;
    auto cfg = harness::test_config();
    cfg.data_dir = dir.path();
    harness::InProcessServer server(cfg);
    grice::json create = {{"id", *transcript.dialogue_id}};
    if (!transcript.config.is_null()) create["config"] = transcript.config;
    auto created = harness::http_post(server.port(), "/v1/dialogues", create);
    if (created.status != 201) return std::string(name) + ": create returned " + std::to_string(created.status);
    std::size_t i = 0;
    for (const auto& u : transcript.turns) {
      grice::json body = {{"speaker", u.speaker}, {"text", u.text}};
      if (!u.assertions.empty()) {
        body["assertions"] = grice::json::array();
        for (const auto& a : u.assertions) body["assertions"].push_back(grice::to_json(a));
      }
      auto r = harness::http_post(server.port(),
                                  "/v1/dialogues/" + *transcript.dialogue_id + "/turns", body);
      if (r.status != 200) return std::string(name) + ": turn returned " + std::to_string(r.status);
      r.body.erase("reply");
      r.body.erase("replyBreaches");
      if (r.body != report["turns"].at(i)) {
        return std::string(name) + ": turn " + std::to_string(i) + " annotation differs";
      }
      ++i;
    }
  }

  // Durability: acknowledged turns survive SIGKILL.
  harness::TempDir dir;
  const auto cfg_path = harness::fixture("test_config.json");
  std::vector<grice::json> acknowledged;
  std::string id;
  {
    harness::ServerProcess server(cfg_path, dir.path());
    id = harness::http_post(server.port(), "/v1/dialogues", grice::json::object())
             .body.at("id").get<std::string>();
    const auto transcript = grice::load_transcript(harness::fixture("clean.json"));
    for (std::size_t i = 0; i < 3; ++i) {
      auto r = harness::http_post(server.port(), "/v1/dialogues/" + id + "/turns",
                                  {{"speaker", "human"}, {"text", transcript.turns[i].text}});
      if (r.status != 200) return "turn before kill returned " + std::to_string(r.status);
      acknowledged.push_back(r.body);
    }
    server.kill_hard();
  }
  harness::ServerProcess restarted(cfg_path, dir.path());
  auto got = harness::http_get(restarted.port(), "/v1/dialogues/" + id);
  if (got.status != 200) return "GET after restart returned " + std::to_string(got.status);
  const auto& turns = got.body.at("turns");
  if (turns.size() != acknowledged.size()) {
    return "restart kept " + std::to_string(turns.size()) + " of " +
           std::to_string(acknowledged.size()) + " turns";
  }
  for (std::size_t i = 0; i < turns.size(); ++i) {
    for (const auto* key : {"turnIndex", "breaches", "acts", "reply", "blackboard", "modes"}) {
      if (turns[i].at(key) != acknowledged[i].at(key)) {
        return "turn " + std::to_string(i) + " field " + key + " changed across restart";
      }
    }
  }
  auto next = harness::http_post(restarted.port(), "/v1/dialogues/" + id + "/turns",
                                 {{"speaker", "human"}, {"text", "Then we bake the bread in the oven."}});
  if (next.status != 200 || next.body.at("turnIndex") != 3) return "dialogue did not continue after restart";
  return std::nullopt;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Failure()>>> criteria = {
      {"cdgs-classic-system", classic_system},
      {"mode-semantics-oracle", mode_semantics},
      {"parse-count-correctness", parse_count},
      {"lda-recovery", lda_recovery},
      {"detector-bands", detector_bands},
      {"policy-totality", policy_totality},
      {"fixture-audits", fixture_audits},
      {"interrupt-containment", interrupt_containment},
      {"service-equivalence-durability", service_equivalence},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Failure f;
    const auto t0 = Clock::now();
    g_note.clear();
    try {
      f = run();
    } catch (const std::exception& e) {
      f = std::string("exception: ") + e.what();
    }
    std::ostringstream line;
    line.precision(2);
    line << std::fixed << (f ? "FAIL " : "PASS ") << name << " ("
         << seconds_since(t0) << " s";
    if (!g_note.empty()) line << ", " << g_note;
    line << ")";
    if (f) line << ": " << *f;
    std::cout << line.str() << std::endl;
    if (f) ++failed;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
