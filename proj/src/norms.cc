#include "grice/norms.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "grice/error.h"
#include "grice/text.h"

namespace grice {

Maxim maxim_of(BreachKind kind) {
  switch (kind) {
    case BreachKind::TooSparse:
    case BreachKind::TooDetailed: return Maxim::Quantity;
    case BreachKind::Unsupported:
    case BreachKind::Contradiction: return Maxim::Quality;
    case BreachKind::OffTopic: return Maxim::Relation;
    case BreachKind::TooLong:
    case BreachKind::Ambiguous: return Maxim::Manner;
  }
  return Maxim::Manner;
}

std::string_view to_string(Maxim maxim) {
  switch (maxim) {
    case Maxim::Quantity: return "Quantity";
    case Maxim::Quality: return "Quality";
    case Maxim::Relation: return "Relation";
    case Maxim::Manner: return "Manner";
  }
  return "?";
}

std::string_view to_string(BreachKind kind) {
  switch (kind) {
    case BreachKind::TooSparse: return "TooSparse";
    case BreachKind::TooDetailed: return "TooDetailed";
    case BreachKind::Unsupported: return "Unsupported";
    case BreachKind::Contradiction: return "Contradiction";
    case BreachKind::OffTopic: return "OffTopic";
    case BreachKind::TooLong: return "TooLong";
    case BreachKind::Ambiguous: return "Ambiguous";
  }
  return "?";
}

Maxim parse_maxim(std::string_view name) {
  for (auto m : {Maxim::Quantity, Maxim::Quality, Maxim::Relation,
                 Maxim::Manner}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::BadRequest, "unknown maxim '" + std::string(name) + "'");
}

BreachKind parse_breach_kind(std::string_view name) {
  for (auto k : kAllBreachKinds) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::BadRequest,
              "unknown breach kind '" + std::string(name) + "'");
}

std::string_view to_string(Polarity p) {
  return p == Polarity::Affirmed ? "affirmed" : "denied";
}

Polarity parse_polarity(std::string_view name) {
  if (name == "affirmed") return Polarity::Affirmed;
  if (name == "denied") return Polarity::Denied;
  throw Error(ErrorCode::BadRequest,
              "polarity must be 'affirmed' or 'denied', got '" +
                  std::string(name) + "'");
}

void MonitorConfig::validate() const {
  auto bad = [](const std::string& field, const std::string& rule) {
    return Error(ErrorCode::ConfigInvalid, field + " " + rule);
  };
  auto open_unit = [](double x) { return x > 0 && x < 1; };
  auto half_open_unit = [](double x) { return x > 0 && x <= 1; };
  if (brevity_max_tokens < 1) throw bad("brevity_max_tokens", "must be >= 1");
  if (quantity_min_content < 1) throw bad("quantity_min_content", "must be >= 1");
  if (quantity_min_content >= quantity_max_content) {
    throw bad("quantity_min_content", "must be < quantity_max_content");
  }
  if (!open_unit(relevance_min)) throw bad("relevance_min", "must be in (0,1)");
  if (!open_unit(context_decay)) throw bad("context_decay", "must be in (0,1)");
  if (!half_open_unit(severity_interrupt)) {
    throw bad("severity_interrupt", "must be in (0,1]");
  }
  if (!half_open_unit(severity_resume)) {
    throw bad("severity_resume", "must be in (0,1]");
  }
  if (ambiguity_cap < 2) throw bad("ambiguity_cap", "must be >= 2");
}

std::string Assertion::triple() const {
  return subject + " " + predicate + " " + object;
}

std::optional<Polarity> BeliefStore::polarity_of(const Assertion& a) const {
  for (const auto& b : beliefs_) {
    if (b.subject == a.subject && b.predicate == a.predicate &&
        b.object == a.object) {
      return b.polarity;
    }
  }
  return std::nullopt;
}

BeliefStore::Insert BeliefStore::insert(const Assertion& a) {
  if (a.subject.empty() || a.predicate.empty() || a.object.empty()) {
    throw Error(ErrorCode::BadRequest, "assertion terms must be non-empty");
  }
  if (auto held = polarity_of(a)) {
    return *held == a.polarity ? Insert::AlreadyPresent : Insert::Rejected;
  }
  beliefs_.push_back({a.subject, a.predicate, a.object, a.polarity});
  return Insert::Added;
}

namespace {

BreachEvent make_event(BreachKind kind, double severity, std::string evidence,
                       nlohmann::json payload) {
  BreachEvent e;
  e.maxim = maxim_of(kind);
  e.kind = kind;
  e.severity = std::clamp(severity, 0.0, 1.0);
  e.evidence = std::move(evidence);
  e.payload = std::move(payload);
  return e;
}

nlohmann::json assertion_json(const Assertion& a) {
  return {{"subject", a.subject},
          {"predicate", a.predicate},
          {"object", a.object},
          {"polarity", to_string(a.polarity)},
          {"hedged", a.hedged}};
}

std::string fixed(double x) {
  std::ostringstream out;
  out.precision(4);
  out << std::fixed << x;
  return out.str();
}

}  // namespace

std::optional<BreachEvent> check_brevity(std::size_t word_count,
                                         const MonitorConfig& cfg) {
  const double limit = cfg.brevity_max_tokens;
  if (word_count <= static_cast<std::size_t>(cfg.brevity_max_tokens)) {
    return std::nullopt;
  }
  double severity = std::min(1.0, (word_count - limit) / limit);
  return make_event(BreachKind::TooLong, severity,
                    std::to_string(word_count) + " words exceeds the limit of " +
                        std::to_string(cfg.brevity_max_tokens),
                    {{"words", word_count}, {"limit", cfg.brevity_max_tokens}});
}

std::optional<BreachEvent> check_quantity(std::size_t content_count,
                                          const MonitorConfig& cfg) {
  const double lo = cfg.quantity_min_content;
  const double hi = cfg.quantity_max_content;
  const double count = static_cast<double>(content_count);
  nlohmann::json payload = {{"contentWords", content_count},
                            {"min", cfg.quantity_min_content},
                            {"max", cfg.quantity_max_content}};
  if (count < lo) {
    return make_event(BreachKind::TooSparse, (lo - count) / lo,
                      std::to_string(content_count) +
                          " content words, fewer than " +
                          std::to_string(cfg.quantity_min_content),
                      std::move(payload));
  }
  if (count > hi) {
    return make_event(BreachKind::TooDetailed, std::min(1.0, (count - hi) / hi),
                      std::to_string(content_count) +
                          " content words, more than " +
                          std::to_string(cfg.quantity_max_content),
                      std::move(payload));
  }
  return std::nullopt;
}

RelevanceCheck check_relevance(const Distribution& turn_theta,
                               const std::optional<Distribution>& context,
                               const MonitorConfig& cfg) {
  RelevanceCheck out;
  if (!context) {
    out.context = turn_theta;
    return out;
  }
  const double score = similarity(turn_theta, *context);
  out.score = score;
  if (score < cfg.relevance_min) {
    out.breach = make_event(
        BreachKind::OffTopic, (cfg.relevance_min - score) / cfg.relevance_min,
        "topic similarity " + fixed(score) + " below " + fixed(cfg.relevance_min),
        {{"similarity", score},
         {"threshold", cfg.relevance_min},
         {"turnTopic", argmax(turn_theta)},
         {"contextTopic", argmax(*context)},
         {"turnTheta", turn_theta},
         {"context", *context}});
  }
  const double lambda = cfg.context_decay;
  out.context.resize(turn_theta.size());
  double sum = 0;
  for (std::size_t k = 0; k < turn_theta.size(); ++k) {
    out.context[k] = lambda * (*context)[k] + (1 - lambda) * turn_theta[k];
    sum += out.context[k];
  }
  for (double& x : out.context) x /= sum;
  return out;
}

std::vector<BreachEvent> check_quality(std::span<const Assertion> assertions,
                                       const BeliefStore& beliefs) {
  std::vector<BreachEvent> out;
  for (const auto& a : assertions) {
    auto held = beliefs.polarity_of(a);
    if (held && *held != a.polarity) {
      out.push_back(make_event(
          BreachKind::Contradiction, 1.0,
          "'" + a.triple() + "' (" + std::string(to_string(a.polarity)) +
              ") contradicts an established belief",
          {{"assertion", assertion_json(a)}}));
    } else if (!held && !a.hedged) {
      out.push_back(make_event(BreachKind::Unsupported, 0.5,
                               "'" + a.triple() + "' is asserted without support",
                               {{"assertion", assertion_json(a)}}));
    }
  }
  return out;
}

std::optional<BreachEvent> check_ambiguity(std::span<const std::string> words,
                                           const ContextFreeGrammar& grammar,
                                           const MonitorConfig& cfg) {
  const auto cap = static_cast<std::uint64_t>(cfg.ambiguity_cap);
  const auto trees = count_parse_trees(grammar, words, cap);
  if (trees < 2) return std::nullopt;
  double severity = std::min(1.0, static_cast<double>(trees - 1) /
                                      static_cast<double>(cap - 1));
  std::string count = std::to_string(trees) + (trees == cap ? "+" : "");
  return make_event(BreachKind::Ambiguous, severity,
                    "utterance has " + count + " readings",
                    {{"parseTrees", trees}, {"saturated", trees == cap}});
}

std::vector<Assertion> extract_assertions(std::string_view text) {
  static const std::vector<std::vector<std::string>> kHedges = {
      {"i", "think"}, {"i", "believe"}, {"i", "guess"},
      {"maybe"},      {"perhaps"},      {"probably"},
  };
  std::vector<Assertion> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find_first_of(".!?;", start);
    if (end == std::string_view::npos) end = text.size();
    auto words = tokenize_words(text.substr(start, end - start));
    start = end + 1;

    bool hedged = false;
    for (const auto& h : kHedges) {
      if (words.size() >= h.size() &&
          std::equal(h.begin(), h.end(), words.begin())) {
        hedged = true;
        words.erase(words.begin(), words.begin() + h.size());
        break;
      }
    }
    auto is = std::find(words.begin(), words.end(), "is");
    if (is == words.begin() || is == words.end()) continue;
    std::string subject;
    for (auto it = is; it != words.begin();) {
      --it;
      if (it->size() >= 2 && !is_stopword(*it)) {
        subject = *it;
        break;
      }
    }
    auto rest = std::vector<std::string>(is + 1, words.end());
    Polarity polarity = Polarity::Affirmed;
    if (!rest.empty() && rest.front() == "not") {
      polarity = Polarity::Denied;
      rest.erase(rest.begin());
    }
    std::string object;
    for (const auto& w : content_words(rest)) {
      object += (object.empty() ? "" : " ") + w;
    }
    if (subject.empty() || object.empty()) continue;
    out.push_back({subject, "is", object, polarity, hedged});
  }
  return out;
}

MonitorResult run_all(const TurnInput& turn, const MonitorContext& context,
                      const MonitorModels& models, const MonitorConfig& cfg) {
  MonitorResult result;
  result.context_theta = context.context_theta;
  auto content = content_words(turn.words);

  if (auto e = check_quantity(content.size(), cfg)) {
    result.breaches.push_back(std::move(*e));
  }

  static const BeliefStore kEmpty;
  for (auto& e : check_quality(turn.assertions,
                               context.beliefs ? *context.beliefs : kEmpty)) {
    result.breaches.push_back(std::move(e));
  }

  if (models.topics) {
    auto doc = models.topics->encode(content);
    if (!doc.empty()) {
      result.turn_theta =
          infer(*models.topics, doc, context.inference_sweeps, context.seed);
      auto rel = check_relevance(*result.turn_theta, context.context_theta, cfg);
      if (rel.breach) result.breaches.push_back(std::move(*rel.breach));
      result.context_theta = std::move(rel.context);
    }
  }

  if (auto e = check_brevity(turn.words.size(), cfg)) {
    result.breaches.push_back(std::move(*e));
  }
  if (models.reference) {
    if (auto e = check_ambiguity(turn.words, *models.reference, cfg)) {
      result.breaches.push_back(std::move(*e));
    }
  }

  for (auto& e : result.breaches) e.turn_index = turn.turn_index;
  return result;
}

}  // namespace grice
