#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "grice/error.h"
#include "grice/text.h"
#include "grice/topics.h"

namespace grice {

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  for (auto& t : tokens) {
    if (find(t)) {
      throw Error(ErrorCode::BadRequest, "duplicate vocabulary token '" + t + "'");
    }
    add(t);
  }
}

TokenId Vocabulary::add(std::string_view token) {
  if (auto id = find(token)) return *id;
  auto id = static_cast<TokenId>(tokens_.size());
  tokens_.emplace_back(token);
  ids_.emplace(tokens_.back(), id);
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

Corpus Corpus::from_lines(std::span<const std::string> lines) {
  Corpus corpus;
  for (const auto& line : lines) {
    auto words = content_words(line);
    if (words.empty()) continue;
    Document doc;
    doc.reserve(words.size());
    for (const auto& w : words) doc.push_back(corpus.vocabulary.add(w));
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

Corpus Corpus::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read corpus " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return from_lines(lines);
}

void LdaConfig::validate() const {
  auto bad = [](const std::string& what) {
    return Error(ErrorCode::ConfigInvalid, "LDA config: " + what);
  };
  if (topics < 1) throw bad("topics must be >= 1");
  if (!(alpha > 0)) throw bad("alpha must be > 0");
  if (!(beta > 0)) throw bad("beta must be > 0");
  if (sweeps < 1) throw bad("sweeps must be >= 1");
  if (burn_in < 0 || burn_in >= sweeps) throw bad("burn_in must be in [0, sweeps)");
}

Document TopicModel::encode(std::span<const std::string> words) const {
  Document doc;
  for (const auto& w : words) {
    if (auto id = vocabulary.find(w)) doc.push_back(*id);
  }
  return doc;
}

std::vector<std::string> TopicModel::top_words(std::size_t k,
                                               std::size_t n) const {
  const auto& row = phi.at(k);
  std::vector<TokenId> ids(row.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(),
                   [&](TokenId a, TokenId b) { return row[a] > row[b]; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, ids.size()); ++i) {
    out.push_back(vocabulary.token(ids[i]));
  }
  return out;
}

namespace {

// Uniform in [0, 1) from the top 53 bits; avoids the implementation-defined
// std::uniform_real_distribution so samples match across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t sample_index(std::span<const double> weights, double u) {
  double total = 0;
  for (double w : weights) total += w;
  double target = u * total;
  double acc = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (target < acc) return k;
  }
  return weights.size() - 1;
}

void normalize(Distribution& d) {
  double sum = std::accumulate(d.begin(), d.end(), 0.0);
  for (double& x : d) x /= sum;
}

}  // namespace

TopicModel train(const Corpus& corpus, const LdaConfig& cfg) {
  cfg.validate();
  if (corpus.documents.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "corpus has no documents");
  }
  const std::size_t K = cfg.topics;
  const std::size_t V = corpus.vocabulary.size();
  const std::size_t D = corpus.documents.size();
  for (std::size_t d = 0; d < D; ++d) {
    if (corpus.documents[d].empty()) {
      throw Error(ErrorCode::EmptyCorpus,
                  "document " + std::to_string(d) + " is empty");
    }
    for (TokenId w : corpus.documents[d]) {
      if (w >= V) {
        throw Error(ErrorCode::DimensionMismatch,
                    "token id " + std::to_string(w) + " outside vocabulary");
      }
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::vector<std::uint32_t>> z(D);
  std::vector<std::uint32_t> doc_topic(D * K, 0);  // n_dk
  std::vector<std::uint32_t> topic_word(K * V, 0);  // n_kw
  std::vector<std::uint32_t> topic_total(K, 0);     // n_k

  for (std::size_t d = 0; d < D; ++d) {
    z[d].resize(corpus.documents[d].size());
    for (std::size_t i = 0; i < z[d].size(); ++i) {
      auto k = static_cast<std::uint32_t>(uniform01(rng) * K);
      z[d][i] = k;
      ++doc_topic[d * K + k];
      ++topic_word[k * V + corpus.documents[d][i]];
      ++topic_total[k];
    }
  }

  const double vbeta = V * cfg.beta;
  std::vector<double> weights(K);
  std::vector<Distribution> phi_sum(K, Distribution(V, 0.0));
  std::vector<Distribution> theta_sum(D, Distribution(K, 0.0));

  for (int sweep = 1; sweep <= cfg.sweeps; ++sweep) {
    for (std::size_t d = 0; d < D; ++d) {
      const auto& doc = corpus.documents[d];
      for (std::size_t i = 0; i < doc.size(); ++i) {
        const TokenId w = doc[i];
        std::uint32_t k = z[d][i];
        --doc_topic[d * K + k];
        --topic_word[k * V + w];
        --topic_total[k];
        for (std::size_t t = 0; t < K; ++t) {
          weights[t] = (doc_topic[d * K + t] + cfg.alpha) *
                       (topic_word[t * V + w] + cfg.beta) /
                       (topic_total[t] + vbeta);
        }
        k = static_cast<std::uint32_t>(sample_index(weights, uniform01(rng)));
        z[d][i] = k;
        ++doc_topic[d * K + k];
        ++topic_word[k * V + w];
        ++topic_total[k];
      }
    }
    if (sweep <= cfg.burn_in) continue;
    for (std::size_t k = 0; k < K; ++k) {
      const double denom = topic_total[k] + vbeta;
      for (std::size_t w = 0; w < V; ++w) {
        phi_sum[k][w] += (topic_word[k * V + w] + cfg.beta) / denom;
      }
    }
    for (std::size_t d = 0; d < D; ++d) {
      const double denom = corpus.documents[d].size() + K * cfg.alpha;
      for (std::size_t k = 0; k < K; ++k) {
        theta_sum[d][k] += (doc_topic[d * K + k] + cfg.alpha) / denom;
      }
    }
  }

  TopicModel model{cfg, corpus.vocabulary, std::move(phi_sum),
                   std::move(theta_sum)};
  for (auto& row : model.phi) normalize(row);
  for (auto& row : model.theta_train) normalize(row);
  return model;
}

Distribution infer(const TopicModel& model, std::span<const TokenId> doc,
                   int sweeps, std::uint64_t seed) {
  if (sweeps < 1) throw Error(ErrorCode::ConfigInvalid, "sweeps must be >= 1");
  const std::size_t K = model.topics();
  const std::size_t V = model.vocabulary.size();
  Document kept;
  for (TokenId w : doc) {
    if (w < V) kept.push_back(w);
  }
  if (kept.empty()) {
    throw Error(ErrorCode::EmptyAfterFiltering,
                "no in-vocabulary tokens to infer topics from");
  }
  const double alpha = model.config.alpha;
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> z(kept.size());
  std::vector<std::uint32_t> counts(K, 0);
  for (auto& k : z) {
    k = static_cast<std::uint32_t>(uniform01(rng) * K);
    ++counts[k];
  }
  const int burn_in = sweeps / 2;
  std::vector<double> weights(K);
  Distribution theta(K, 0.0);
  for (int sweep = 1; sweep <= sweeps; ++sweep) {
    for (std::size_t i = 0; i < kept.size(); ++i) {
      --counts[z[i]];
      for (std::size_t k = 0; k < K; ++k) {
        weights[k] = (counts[k] + alpha) * model.phi[k][kept[i]];
      }
      z[i] = static_cast<std::uint32_t>(sample_index(weights, uniform01(rng)));
      ++counts[z[i]];
    }
    if (sweep <= burn_in) continue;
    const double denom = kept.size() + K * alpha;
    for (std::size_t k = 0; k < K; ++k) theta[k] += (counts[k] + alpha) / denom;
  }
  normalize(theta);
  return theta;
}

Distribution infer_words(const TopicModel& model,
                         std::span<const std::string> words, int sweeps,
                         std::uint64_t seed) {
  return infer(model, model.encode(words), sweeps, seed);
}

double hellinger(std::span<const double> p, std::span<const double> q) {
  double sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    sum += d * d;
  }
  return std::clamp(std::sqrt(sum) / std::sqrt(2.0), 0.0, 1.0);
}

double similarity(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) {
    throw Error(ErrorCode::DimensionMismatch,
                "distributions of length " + std::to_string(p.size()) +
                    " and " + std::to_string(q.size()));
  }
  for (auto d : {p, q}) {
    double sum = 0;
    for (double x : d) {
      if (!(x >= 0)) throw Error(ErrorCode::NotNormalized, "negative probability");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw Error(ErrorCode::NotNormalized,
                  "distribution sums to " + std::to_string(sum));
    }
  }
  return 1.0 - hellinger(p, q);
}

std::size_t argmax(std::span<const double> p) {
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) -
                                  p.begin());
}

}  // namespace grice
