#ifndef GRICE_TESTS_ORACLES_H_
#define GRICE_TESTS_ORACLES_H_

// Reference implementations the engine is checked against. They share no
// code with the library beyond its data types and are written for
// obviousness, not speed.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "grice/grammar.h"
#include "grice/parse_count.h"

namespace oracle {

using Word = std::vector<std::string>;

// Terminal words of length <= max_len, by breadth-first search over
// configurations (form, active component, rewrites so far in the block).
std::set<Word> cdgs_language(const grice::Cdgs& g,
                             const grice::ModeAssignment& modes,
                             std::size_t max_len);

// Textbook leftmost-derivation generator for one context-free grammar.
std::set<Word> cf_language(const grice::ContextFreeGrammar& g,
                           std::size_t max_len);

// Builds every parse tree of `word` explicitly (as bracketed strings) and
// counts the distinct ones. Needs a grammar without unit-rule cycles.
std::uint64_t count_trees(const grice::ContextFreeGrammar& g, const Word& word);

// All terminal words over the grammar's alphabet up to `max_len`.
std::vector<Word> all_words(const grice::ContextFreeGrammar& g,
                            std::size_t max_len);

// (1/sqrt 2) * || sqrt p - sqrt q ||_2.
double hellinger(const std::vector<double>& p, const std::vector<double>& q);

// A corpus drawn from known topics with disjoint vocabularies: topic t owns
// words "t<t>w<i>", each document mixes topics by a symmetric Dirichlet.
struct SyntheticCorpus {
  std::vector<std::string> lines;
  std::vector<std::string> vocabulary;           // all topic words
  std::vector<std::vector<double>> phi;          // topics x vocabulary
  std::vector<std::vector<double>> theta;        // documents x topics
};

SyntheticCorpus synthetic_corpus(std::uint64_t seed, int topics, int documents,
                                 int words_per_document, int words_per_topic,
                                 double alpha);

// Best mean Hellinger distance between the rows of `truth` and the rows of
// `found` over every matching of rows (re-indexing `found`'s columns through
// `found_vocab`).
double matched_topic_distance(const SyntheticCorpus& truth,
                              const std::vector<std::vector<double>>& found,
                              const std::vector<std::string>& found_vocab);

}  // namespace oracle

#endif  // GRICE_TESTS_ORACLES_H_
