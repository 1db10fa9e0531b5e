#ifndef GRICE_TOPICS_H_
#define GRICE_TOPICS_H_

// Latent Dirichlet allocation by collapsed Gibbs sampling, and the bounded
// distribution similarity used for relevance checks.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace grice {

using Distribution = std::vector<double>;
using TokenId = std::uint32_t;
using Document = std::vector<TokenId>;

// Dense token <-> id bijection; ids are assigned in insertion order.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws Error(BadRequest) on duplicate tokens.
  explicit Vocabulary(std::vector<std::string> tokens);

  TokenId add(std::string_view token);
  std::optional<TokenId> find(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

struct Corpus {
  Vocabulary vocabulary;
  std::vector<Document> documents;

  // One document per line; lines are reduced to their content words and
  // lines with none are skipped.
  static Corpus from_lines(std::span<const std::string> lines);
  static Corpus from_file(const std::filesystem::path& path);
};

struct LdaConfig {
  int topics = 2;
  double alpha = 0.5;
  double beta = 0.01;
  int sweeps = 500;
  int burn_in = 250;
  std::uint64_t seed = 1;

  // Throws Error(ConfigInvalid).
  void validate() const;

  bool operator==(const LdaConfig&) const = default;
};

struct TopicModel {
  LdaConfig config;
  Vocabulary vocabulary;
  std::vector<Distribution> phi;          // topics x vocabulary
  std::vector<Distribution> theta_train;  // documents x topics

  std::size_t topics() const { return phi.size(); }

  // In-vocabulary ids of `words`, in order; unknown words are dropped.
  Document encode(std::span<const std::string> words) const;

  // The n most probable words of topic k, ties broken by id.
  std::vector<std::string> top_words(std::size_t k, std::size_t n) const;

  bool operator==(const TopicModel&) const = default;
};

// Posterior-mean phi and theta averaged over the sweeps after burn-in.
// Bit-deterministic in (corpus, cfg). Throws Error(EmptyCorpus) when there are
// no documents or a document is empty.
TopicModel train(const Corpus& corpus, const LdaConfig& cfg);

// Fold-in sampling of one document's topic mix with phi held fixed. Ids
// outside the vocabulary are dropped; throws Error(EmptyAfterFiltering) when
// nothing remains.
Distribution infer(const TopicModel& model, std::span<const TokenId> doc,
                   int sweeps, std::uint64_t seed);
Distribution infer_words(const TopicModel& model,
                         std::span<const std::string> words, int sweeps,
                         std::uint64_t seed);

// (1/sqrt 2) * || sqrt p - sqrt q ||_2, in [0, 1].
double hellinger(std::span<const double> p, std::span<const double> q);

// 1 - hellinger(p, q). Throws Error(DimensionMismatch) for different lengths
// and Error(NotNormalized) unless both are distributions within 1e-6.
double similarity(std::span<const double> p, std::span<const double> q);

// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> p);

// JSON document {config, vocabulary, phi, thetaTrain}.
std::string dump_topic_model(const TopicModel& model);
TopicModel parse_topic_model(std::string_view json_text);
void save_topic_model(const TopicModel& model, const std::filesystem::path& path);
TopicModel load_topic_model(const std::filesystem::path& path);

}  // namespace grice

#endif  // GRICE_TOPICS_H_
