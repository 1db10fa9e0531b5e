#include "grice/grammar.h"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "grice/error.h"
#include "grice/parse_count.h"

namespace grice {

Symbol nonterminal(std::string name) {
  return Symbol{std::move(name), SymbolKind::Nonterminal};
}

Symbol terminal(std::string name) {
  return Symbol{std::move(name), SymbolKind::Terminal};
}

bool is_valid_symbol_name(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) {
    return false;
  }
  return std::all_of(name.begin() + 1, name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  });
}

bool is_terminal_form(std::span<const Symbol> form) {
  return std::all_of(form.begin(), form.end(),
                     [](const Symbol& s) { return s.is_terminal(); });
}

namespace {

bool is_compact_name(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) {
    return false;
  }
  return std::all_of(name.begin() + 1, name.end(),
                     [](char c) { return c == '\''; });
}

}  // namespace

std::string to_string(std::span<const Symbol> form) {
  bool compact = std::all_of(form.begin(), form.end(), [](const Symbol& s) {
    return is_compact_name(s.name);
  });
  std::string out;
  for (std::size_t i = 0; i < form.size(); ++i) {
    if (!compact && i > 0) out += ' ';
    out += form[i].name;
  }
  return out;
}

bool shortlex_less(const SententialForm& a, const SententialForm& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return to_string(a) < to_string(b);
}

std::string to_string(const Production& p) {
  std::string out = p.lhs.name + " ->";
  for (const auto& s : p.rhs) out += " " + s.name;
  return out;
}

bool Component::has_applicable_rule(std::span<const Symbol> form) const {
  for (const auto& s : form) {
    if (s.is_terminal()) continue;
    for (const auto& p : productions) {
      if (p.lhs == s) return true;
    }
  }
  return false;
}

bool Component::contains(const Production& p) const {
  return std::find(productions.begin(), productions.end(), p) !=
         productions.end();
}

// ---------------------------------------------------------------------------
// Modes.

namespace {

DerivationMode counted(ModeTag tag, int k) {
  if (k < 1) {
    throw Error(ErrorCode::SyntaxError,
                "derivation mode bound must be >= 1, got " + std::to_string(k));
  }
  return DerivationMode{tag, k};
}

}  // namespace

DerivationMode DerivationMode::exactly(int k) {
  return counted(ModeTag::Exactly, k);
}
DerivationMode DerivationMode::at_most(int k) {
  return counted(ModeTag::AtMost, k);
}
DerivationMode DerivationMode::at_least(int k) {
  return counted(ModeTag::AtLeast, k);
}

bool DerivationMode::accepts(int steps, bool can_continue) const {
  switch (tag) {
    case ModeTag::Star: return steps >= 1;
    case ModeTag::Terminal: return !can_continue;
    case ModeTag::Exactly: return steps == k;
    case ModeTag::AtMost: return steps >= 1 && steps <= k;
    case ModeTag::AtLeast: return steps >= k;
  }
  return false;
}

DerivationMode parse_mode(std::string_view text) {
  auto bound = [&](std::string_view digits) {
    int k = 0;
    auto [ptr, ec] = std::from_chars(digits.data(),
                                     digits.data() + digits.size(), k);
    if (ec != std::errc() || ptr != digits.data() + digits.size() ||
        digits.empty()) {
      throw Error(ErrorCode::SyntaxError,
                  "bad derivation mode '" + std::string(text) + "'");
    }
    return k;
  };
  if (text == "*") return DerivationMode::star();
  if (text == "t") return DerivationMode::terminal();
  if (text.starts_with("<=")) return DerivationMode::at_most(bound(text.substr(2)));
  if (text.starts_with(">=")) return DerivationMode::at_least(bound(text.substr(2)));
  if (text.starts_with("≤")) {
    return DerivationMode::at_most(bound(text.substr(3)));
  }
  if (text.starts_with("≥")) {
    return DerivationMode::at_least(bound(text.substr(3)));
  }
  if (text.starts_with("=")) return DerivationMode::exactly(bound(text.substr(1)));
  throw Error(ErrorCode::SyntaxError,
              "bad derivation mode '" + std::string(text) + "'");
}

std::string to_string(DerivationMode mode) {
  switch (mode.tag) {
    case ModeTag::Star: return "*";
    case ModeTag::Terminal: return "t";
    case ModeTag::Exactly: return "=" + std::to_string(mode.k);
    case ModeTag::AtMost: return "<=" + std::to_string(mode.k);
    case ModeTag::AtLeast: return ">=" + std::to_string(mode.k);
  }
  return "?";
}

DerivationMode ModeAssignment::of(const std::string& component_id) const {
  auto it = overrides_.find(component_id);
  return it == overrides_.end() ? default_ : it->second;
}

// ---------------------------------------------------------------------------
// Cdgs.

Cdgs::Cdgs(std::vector<Symbol> nonterminals, std::vector<Symbol> terminals,
           Symbol axiom, std::vector<Component> components,
           DerivationMode default_mode)
    : nonterminals_(std::move(nonterminals)),
      terminals_(std::move(terminals)),
      axiom_(std::move(axiom)),
      components_(std::move(components)),
      default_mode_(default_mode) {
  std::map<std::string, SymbolKind> declared;
  auto declare = [&](const Symbol& s, SymbolKind expected) {
    if (s.kind != expected) {
      throw Error(ErrorCode::SyntaxError, "symbol '" + s.name +
                                              "' declared with the wrong kind");
    }
    if (!is_valid_symbol_name(s.name)) {
      throw Error(ErrorCode::SyntaxError, "bad symbol name '" + s.name + "'");
    }
    if (!declared.emplace(s.name, s.kind).second) {
      throw Error(ErrorCode::SyntaxError,
                  "symbol '" + s.name + "' declared twice");
    }
  };
  for (const auto& s : nonterminals_) declare(s, SymbolKind::Nonterminal);
  for (const auto& s : terminals_) declare(s, SymbolKind::Terminal);

  auto check_declared = [&](const Symbol& s) {
    auto it = declared.find(s.name);
    if (it == declared.end() || it->second != s.kind) {
      throw Error(ErrorCode::UndeclaredSymbol,
                  "undeclared symbol '" + s.name + "'");
    }
  };
  check_declared(axiom_);
  if (axiom_.is_terminal()) {
    throw Error(ErrorCode::SyntaxError, "axiom must be a nonterminal");
  }
  if (components_.empty()) {
    throw Error(ErrorCode::EmptyComponent, "grammar system has no components");
  }
  std::set<std::string> ids;
  for (const auto& c : components_) {
    if (!ids.insert(c.id).second) {
      throw Error(ErrorCode::DuplicateComponentId,
                  "duplicate component '" + c.id + "'");
    }
    if (c.productions.empty()) {
      throw Error(ErrorCode::EmptyComponent,
                  "component '" + c.id + "' has no productions");
    }
    std::set<Production> seen;
    for (const auto& p : c.productions) {
      check_declared(p.lhs);
      if (p.lhs.is_terminal()) {
        throw Error(ErrorCode::SyntaxError,
                    "left-hand side '" + p.lhs.name + "' is a terminal");
      }
      if (p.rhs.empty()) {
        throw Error(ErrorCode::ErasingRuleRejected,
                    "erasing rule '" + to_string(p) + "' in component '" +
                        c.id + "'");
      }
      for (const auto& s : p.rhs) check_declared(s);
      if (!seen.insert(p).second) {
        throw Error(ErrorCode::SyntaxError, "duplicate production '" +
                                                to_string(p) + "' in '" +
                                                c.id + "'");
      }
    }
  }
  if (default_mode_.tag != ModeTag::Star &&
      default_mode_.tag != ModeTag::Terminal && default_mode_.k < 1) {
    throw Error(ErrorCode::SyntaxError, "derivation mode bound must be >= 1");
  }
}

const Component* Cdgs::find_component(std::string_view id) const {
  for (const auto& c : components_) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const Component& Cdgs::component(std::string_view id) const {
  if (const auto* c = find_component(id)) return *c;
  throw Error(ErrorCode::InvalidTrace,
              "unknown component '" + std::string(id) + "'");
}

std::optional<Symbol> Cdgs::lookup(std::string_view name) const {
  for (const auto* alphabet : {&nonterminals_, &terminals_}) {
    for (const auto& s : *alphabet) {
      if (s.name == name) return s;
    }
  }
  return std::nullopt;
}

SententialForm Cdgs::read_form(std::string_view text) const {
  SententialForm form;
  auto undeclared = [&](std::string_view what) {
    return Error(ErrorCode::UndeclaredSymbol,
                 "undeclared symbol '" + std::string(what) + "'");
  };
  bool spaced = text.find_first_of(" \t") != std::string_view::npos;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    if (spaced) {
      std::size_t end = i;
      while (end < text.size() &&
             !std::isspace(static_cast<unsigned char>(text[end]))) {
        ++end;
      }
      auto name = text.substr(i, end - i);
      auto s = lookup(name);
      if (!s) throw undeclared(name);
      form.push_back(*s);
      i = end;
      continue;
    }
    std::optional<Symbol> best;
    for (const auto* alphabet : {&nonterminals_, &terminals_}) {
      for (const auto& s : *alphabet) {
        if (text.substr(i).starts_with(s.name) &&
            (!best || s.name.size() > best->name.size())) {
          best = s;
        }
      }
    }
    if (!best) throw undeclared(text.substr(i, 1));
    i += best->name.size();
    form.push_back(*best);
  }
  return form;
}

ContextFreeGrammar Cdgs::merged() const {
  std::vector<Production> all;
  std::set<Production> seen;
  for (const auto& c : components_) {
    for (const auto& p : c.productions) {
      if (seen.insert(p).second) all.push_back(p);
    }
  }
  return ContextFreeGrammar(nonterminals_, terminals_, axiom_, std::move(all));
}

}  // namespace grice
