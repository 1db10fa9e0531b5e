#ifndef GRICE_NORMS_H_
#define GRICE_NORMS_H_

// Breach detectors for the four conversational maxims. Every detector is a
// pure function of its inputs.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grice/parse_count.h"
#include "grice/topics.h"
#include "json.hpp"

namespace grice {

enum class Maxim { Quantity, Quality, Relation, Manner };

enum class BreachKind {
  TooSparse,
  TooDetailed,
  Unsupported,
  Contradiction,
  OffTopic,
  TooLong,
  Ambiguous,
};

inline constexpr BreachKind kAllBreachKinds[] = {
    BreachKind::TooSparse,   BreachKind::TooDetailed, BreachKind::Unsupported,
    BreachKind::Contradiction, BreachKind::OffTopic,  BreachKind::TooLong,
    BreachKind::Ambiguous,
};

Maxim maxim_of(BreachKind kind);
std::string_view to_string(Maxim maxim);
std::string_view to_string(BreachKind kind);
// Throw Error(BadRequest) on unknown names.
Maxim parse_maxim(std::string_view name);
BreachKind parse_breach_kind(std::string_view name);

struct MonitorConfig {
  int brevity_max_tokens = 30;
  int quantity_min_content = 3;
  int quantity_max_content = 60;
  double relevance_min = 0.5;
  double context_decay = 0.7;
  double severity_interrupt = 0.5;
  double severity_resume = 0.5;
  int ambiguity_cap = 8;
  bool monitor_robot = true;

  // Throws Error(ConfigInvalid) naming the first bad field.
  void validate() const;

  bool operator==(const MonitorConfig&) const = default;
};

struct BreachEvent {
  Maxim maxim = Maxim::Quantity;
  BreachKind kind = BreachKind::TooSparse;
  double severity = 0;
  int turn_index = 0;
  std::string evidence;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const BreachEvent&) const = default;
};

enum class Polarity { Affirmed, Denied };

std::string_view to_string(Polarity p);
Polarity parse_polarity(std::string_view name);

struct Assertion {
  std::string subject;
  std::string predicate;
  std::string object;
  Polarity polarity = Polarity::Affirmed;
  bool hedged = false;

  std::string triple() const;  // "subject predicate object"
  bool operator==(const Assertion&) const = default;
};

// Polarized subject-predicate-object triples. Never holds a triple with both
// polarities.
class BeliefStore {
 public:
  struct Belief {
    std::string subject, predicate, object;
    Polarity polarity;
    auto operator<=>(const Belief&) const = default;
  };

  enum class Insert { Added, AlreadyPresent, Rejected };

  Insert insert(const Assertion& a);
  std::optional<Polarity> polarity_of(const Assertion& a) const;
  const std::vector<Belief>& beliefs() const { return beliefs_; }
  std::size_t size() const { return beliefs_.size(); }

  bool operator==(const BeliefStore&) const = default;

 private:
  std::vector<Belief> beliefs_;  // insertion order
};

// Manner / TooLong when the turn has more than brevity_max_tokens words.
std::optional<BreachEvent> check_brevity(std::size_t word_count,
                                         const MonitorConfig& cfg);

// Quantity / TooSparse or TooDetailed outside [q_min, q_max] content words.
std::optional<BreachEvent> check_quantity(std::size_t content_count,
                                          const MonitorConfig& cfg);

struct RelevanceCheck {
  std::optional<BreachEvent> breach;
  Distribution context;  // updated topic context
  std::optional<double> score;
};

// Compares a turn's topic mix with the running context. Without a context
// (first turn) nothing fires and the context becomes the turn's mix.
RelevanceCheck check_relevance(const Distribution& turn_theta,
                               const std::optional<Distribution>& context,
                               const MonitorConfig& cfg);

// Quality / Contradiction for a triple held with the opposite polarity,
// Quality / Unsupported for an unknown unhedged triple. Reads only.
std::vector<BreachEvent> check_quality(std::span<const Assertion> assertions,
                                       const BeliefStore& beliefs);

// Manner / Ambiguous when the words have two or more parse trees under the
// reference grammar. Unparsable input is not ambiguous.
std::optional<BreachEvent> check_ambiguity(std::span<const std::string> words,
                                           const ContextFreeGrammar& grammar,
                                           const MonitorConfig& cfg);

// Minimal "X is Y" / "X is not Y" extractor for free text; sentences opening
// with a hedge ("i think", "maybe", ...) yield hedged assertions.
std::vector<Assertion> extract_assertions(std::string_view text);

struct TurnInput {
  int turn_index = 0;
  std::vector<std::string> words;  // tokenize_words of the utterance
  std::vector<Assertion> assertions;
};

struct MonitorContext {
  const BeliefStore* beliefs = nullptr;
  std::optional<Distribution> context_theta;
  std::uint64_t seed = 0;
  int inference_sweeps = 50;
};

struct MonitorModels {
  const TopicModel* topics = nullptr;              // null: no relevance check
  const ContextFreeGrammar* reference = nullptr;   // null: no ambiguity check
};

struct MonitorResult {
  std::vector<BreachEvent> breaches;
  std::optional<Distribution> turn_theta;     // absent if nothing to infer from
  std::optional<Distribution> context_theta;  // updated context
};

// Runs Quantity, Quality, Relation, then Manner (brevity before ambiguity).
MonitorResult run_all(const TurnInput& turn, const MonitorContext& context,
                      const MonitorModels& models, const MonitorConfig& cfg);

}  // namespace grice

#endif  // GRICE_NORMS_H_
