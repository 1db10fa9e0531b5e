#include "grice/parse_count.h"

#include <algorithm>
#include <map>

#include "grice/error.h"

namespace grice {

ContextFreeGrammar::ContextFreeGrammar(std::vector<Symbol> nonterminals,
                                       std::vector<Symbol> terminals,
                                       Symbol axiom,
                                       std::vector<Production> productions)
    : nonterminals_(std::move(nonterminals)),
      terminals_(std::move(terminals)),
      axiom_(std::move(axiom)),
      productions_(std::move(productions)) {}

bool ContextFreeGrammar::is_epsilon_free() const {
  return std::none_of(productions_.begin(), productions_.end(),
                      [](const Production& p) { return p.rhs.empty(); });
}

bool ContextFreeGrammar::has_terminal(std::string_view name) const {
  return std::any_of(terminals_.begin(), terminals_.end(),
                     [&](const Symbol& s) { return s.name == name; });
}

namespace {

using Count = std::uint64_t;

Count sat_add(Count a, Count b, Count cap) { return std::min(cap, a + b); }
Count sat_mul(Count a, Count b, Count cap) {
  if (a == 0 || b == 0) return 0;
  return a > cap / b ? cap : std::min(cap, a * b);
}

}  // namespace

// CKY-style chart over spans with arbitrary-length right-hand sides. Each
// production is matched against a span by a left-to-right pass over its
// symbols; unit productions within one span are closed by a saturating
// fixed point, which terminates because counts only grow and are capped.
std::uint64_t count_parse_trees(const ContextFreeGrammar& g,
                                std::span<const std::string> word,
                                std::uint64_t cap) {
  if (cap < 2) {
    throw Error(ErrorCode::ConfigInvalid, "parse-count cap must be >= 2");
  }
  if (!g.is_epsilon_free()) {
    throw Error(ErrorCode::NotEpsilonFree, "grammar has an erasing rule");
  }
  const std::size_t n = word.size();
  if (n == 0) return 0;
  for (const auto& w : word) {
    if (!g.has_terminal(w)) return 0;
  }

  std::map<std::string, std::size_t> index;
  for (const auto& s : g.nonterminals()) index.emplace(s.name, index.size());
  if (!index.count(g.axiom().name)) return 0;
  const std::size_t nts = index.size();

  // chart[(i * (n + 1) + j) * nts + A] = trees of A over word[i, j)
  std::vector<Count> chart((n + 1) * (n + 1) * nts, 0);
  auto cell = [&](std::size_t i, std::size_t j, std::size_t a) -> Count& {
    return chart[(i * (n + 1) + j) * nts + a];
  };
  auto span_count = [&](const Symbol& s, std::size_t i, std::size_t j) {
    if (s.is_terminal()) return Count(j == i + 1 && word[i] == s.name);
    auto it = index.find(s.name);
    return it == index.end() ? Count(0) : cell(i, j, it->second);
  };

  std::vector<const Production*> units;
  for (const auto& p : g.productions()) {
    if (p.rhs.size() == 1 && !p.rhs[0].is_terminal()) units.push_back(&p);
  }

  for (std::size_t len = 1; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      const std::size_t j = i + len;
      for (const auto& p : g.productions()) {
        if (p.rhs.size() > len) continue;
        if (p.rhs.size() == 1 && !p.rhs[0].is_terminal()) continue;
        auto lhs = index.find(p.lhs.name);
        if (lhs == index.end()) continue;
        // ways[e] = ways to cover word[i, e) with the first k rhs symbols
        std::vector<Count> ways(n + 1, 0);
        ways[i] = 1;
        for (std::size_t k = 0; k < p.rhs.size(); ++k) {
          std::vector<Count> next(n + 1, 0);
          const std::size_t remaining = p.rhs.size() - k - 1;
          for (std::size_t s = i; s < j; ++s) {
            if (ways[s] == 0) continue;
            for (std::size_t e = s + 1; e + remaining <= j; ++e) {
              Count c = span_count(p.rhs[k], s, e);
              if (c) next[e] = sat_add(next[e], sat_mul(ways[s], c, cap), cap);
            }
          }
          ways = std::move(next);
        }
        Count& target = cell(i, j, lhs->second);
        target = sat_add(target, ways[j], cap);
      }
      if (units.empty()) continue;
      // Unit closure: base counts plus unit derivations over the same span.
      std::vector<Count> base(nts);
      for (std::size_t a = 0; a < nts; ++a) base[a] = cell(i, j, a);
      bool changed = true;
      while (changed) {
        changed = false;
        std::vector<Count> next = base;
        for (const auto* u : units) {
          auto lhs = index.find(u->lhs.name);
          auto rhs = index.find(u->rhs[0].name);
          if (lhs == index.end() || rhs == index.end()) continue;
          next[lhs->second] =
              sat_add(next[lhs->second], cell(i, j, rhs->second), cap);
        }
        for (std::size_t a = 0; a < nts; ++a) {
          if (next[a] != cell(i, j, a)) {
            cell(i, j, a) = next[a];
            changed = true;
          }
        }
      }
    }
  }
  return cell(0, n, index.at(g.axiom().name));
}

}  // namespace grice
