#ifndef GRICE_PARSE_COUNT_H_
#define GRICE_PARSE_COUNT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "grice/grammar.h"

namespace grice {

// A single context-free grammar, as used for ambiguity checks.
class ContextFreeGrammar {
 public:
  // Unlike Cdgs, erasing rules are representable here so that callers
  // building grammars programmatically get NotEpsilonFree from the counter.
  ContextFreeGrammar(std::vector<Symbol> nonterminals,
                     std::vector<Symbol> terminals, Symbol axiom,
                     std::vector<Production> productions);

  const std::vector<Symbol>& nonterminals() const { return nonterminals_; }
  const std::vector<Symbol>& terminals() const { return terminals_; }
  const Symbol& axiom() const { return axiom_; }
  const std::vector<Production>& productions() const { return productions_; }

  bool is_epsilon_free() const;
  bool has_terminal(std::string_view name) const;

 private:
  std::vector<Symbol> nonterminals_;
  std::vector<Symbol> terminals_;
  Symbol axiom_;
  std::vector<Production> productions_;
};

// Number of distinct parse trees of `word` (a sequence of terminal names)
// rooted at the axiom, saturating at `cap`. Words containing a name outside
// the terminal alphabet have zero trees. Cyclic unit chains yield infinitely
// many trees and saturate.
//
// Throws Error(NotEpsilonFree) for grammars with erasing rules and
// Error(ConfigInvalid) if cap < 2.
std::uint64_t count_parse_trees(const ContextFreeGrammar& g,
                                std::span<const std::string> word,
                                std::uint64_t cap);

}  // namespace grice

#endif  // GRICE_PARSE_COUNT_H_
