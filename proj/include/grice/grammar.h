#ifndef GRICE_GRAMMAR_H_
#define GRICE_GRAMMAR_H_

// Cooperating distributed grammar systems: several context-free components
// rewriting one shared sentential form (the blackboard), each holding it for a
// block of steps whose length is governed by a derivation mode.

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace grice {

enum class SymbolKind { Nonterminal, Terminal };

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::Terminal;

  bool is_terminal() const { return kind == SymbolKind::Terminal; }
  auto operator<=>(const Symbol&) const = default;
};

Symbol nonterminal(std::string name);
Symbol terminal(std::string name);

// Names match [A-Za-z][A-Za-z0-9_']*.
bool is_valid_symbol_name(std::string_view name);

using SententialForm = std::vector<Symbol>;

bool is_terminal_form(std::span<const Symbol> form);

// Symbols are written back to back when every name is a single letter with
// optional primes ("aA'bcB'"), otherwise separated by single spaces.
std::string to_string(std::span<const Symbol> form);

// Length first, then lexicographic on the rendered string.
bool shortlex_less(const SententialForm& a, const SententialForm& b);

struct Production {
  Symbol lhs;
  std::vector<Symbol> rhs;

  auto operator<=>(const Production&) const = default;
};

std::string to_string(const Production& p);

struct Component {
  std::string id;
  std::vector<Production> productions;

  bool has_applicable_rule(std::span<const Symbol> form) const;
  bool contains(const Production& p) const;

  bool operator==(const Component&) const = default;
};

enum class ModeTag { Star, Terminal, Exactly, AtMost, AtLeast };

struct DerivationMode {
  ModeTag tag = ModeTag::Terminal;
  int k = 0;  // >= 1 for Exactly/AtMost/AtLeast, 0 otherwise

  static DerivationMode star() { return {ModeTag::Star, 0}; }
  static DerivationMode terminal() { return {ModeTag::Terminal, 0}; }
  static DerivationMode exactly(int k);
  static DerivationMode at_most(int k);
  static DerivationMode at_least(int k);

  // Whether a block of `steps` rewrites ending in a form where the component
  // can (`can_continue`) or cannot rewrite further is a complete block.
  bool accepts(int steps, bool can_continue) const;

  bool operator==(const DerivationMode&) const = default;
};

// Accepts "*", "t", "=k", "<=k", ">=k" (also "≤k", "≥k").
DerivationMode parse_mode(std::string_view text);
std::string to_string(DerivationMode mode);

// Mode used by each component: a default plus per-component overrides.
class ModeAssignment {
 public:
  ModeAssignment(DerivationMode uniform = DerivationMode::terminal())  // NOLINT
      : default_(uniform) {}

  void set(const std::string& component_id, DerivationMode mode) {
    overrides_[component_id] = mode;
  }
  DerivationMode of(const std::string& component_id) const;
  DerivationMode uniform() const { return default_; }

 private:
  DerivationMode default_;
  std::map<std::string, DerivationMode> overrides_;
};

class ContextFreeGrammar;

// A validated grammar system. Immutable after construction.
class Cdgs {
 public:
  // Throws Error on any violated invariant (undeclared symbols, overlapping
  // alphabets, erasing rules, empty or duplicate components).
  Cdgs(std::vector<Symbol> nonterminals, std::vector<Symbol> terminals,
       Symbol axiom, std::vector<Component> components,
       DerivationMode default_mode = DerivationMode::terminal());

  const std::vector<Symbol>& nonterminals() const { return nonterminals_; }
  const std::vector<Symbol>& terminals() const { return terminals_; }
  const Symbol& axiom() const { return axiom_; }
  const std::vector<Component>& components() const { return components_; }
  DerivationMode default_mode() const { return default_mode_; }

  // Throws Error(InvalidTrace) for an unknown id.
  const Component& component(std::string_view id) const;
  const Component* find_component(std::string_view id) const;

  std::optional<Symbol> lookup(std::string_view name) const;

  // Reads a form written either with whitespace between symbols or with
  // symbols run together (greedy longest match against the alphabet).
  // Throws Error(UndeclaredSymbol) on anything outside the alphabet.
  SententialForm read_form(std::string_view text) const;

  // Union of all components' productions as one context-free grammar.
  ContextFreeGrammar merged() const;

  bool operator==(const Cdgs&) const = default;

 private:
  std::vector<Symbol> nonterminals_;
  std::vector<Symbol> terminals_;
  Symbol axiom_;
  std::vector<Component> components_;
  DerivationMode default_mode_;
};

// Parses the line-oriented grammar definition format. Errors carry the
// 1-based line and column of the offending token.
Cdgs parse_grammar(std::string_view text);
Cdgs load_grammar_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Derivation.

struct RewriteStep {
  Production production;
  std::size_t position = 0;

  bool operator==(const RewriteStep&) const = default;
};

struct Successor {
  SententialForm form;
  Production production;
  std::size_t position = 0;
};

// Every result of applying one production of `component` at one position of
// `form`, ordered by position and then by production order.
std::vector<Successor> step(const Component& component,
                            std::span<const Symbol> form);

struct DeriveBounds {
  int max_steps = 64;
  std::size_t max_len = 64;
};

struct DeriveResult {
  std::set<SententialForm> forms;
  bool truncated = false;
};

// All forms reachable from `form` by one block of `component` in `mode`.
// Forms longer than max_len are pruned, which loses nothing since rules never
// shrink a form. Blocks cut off at max_steps are reported through `truncated`.
DeriveResult derive_in_mode(const Component& component,
                            const SententialForm& form, DerivationMode mode,
                            DeriveBounds bounds = {});

struct Language {
  std::set<SententialForm> words;
  bool truncated = false;

  // Words in shortlex order.
  std::vector<SententialForm> sorted() const;
};

// Terminal words of length <= max_len generated from the axiom by any
// sequence of blocks totalling at most max_steps rewrites.
Language enumerate_language(const Cdgs& g, const ModeAssignment& modes,
                            std::size_t max_len, int max_steps);

struct TraceBlock {
  std::string component_id;
  DerivationMode mode;
  std::vector<RewriteStep> steps;
  SententialForm result;

  bool operator==(const TraceBlock&) const = default;
};

struct DerivationTrace {
  std::vector<TraceBlock> blocks;

  bool operator==(const DerivationTrace&) const = default;
};

// A witness derivation for `word` if it is generated within `bounds`.
// Throws Error(NonTerminalInput) if the word contains a nonterminal.
// Zero-step blocks are never part of a witness.
std::optional<DerivationTrace> membership(const Cdgs& g,
                                          const ModeAssignment& modes,
                                          const SententialForm& word,
                                          DeriveBounds bounds = {});

// Applies `steps` in order and checks that they form a complete block in
// `mode`. Throws Error(InvalidTrace) on any mismatch.
SententialForm apply_block(const Component& component, SententialForm form,
                           DerivationMode mode,
                           std::span<const RewriteStep> steps);

// Replays every block from the axiom, checking each recorded result.
SententialForm replay(const Cdgs& g, const DerivationTrace& trace);

}  // namespace grice

#endif  // GRICE_GRAMMAR_H_
