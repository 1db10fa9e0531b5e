#include <algorithm>
#include <map>
#include <queue>

#include "grice/error.h"
#include "grice/grammar.h"

namespace grice {

std::vector<Successor> step(const Component& component,
                            std::span<const Symbol> form) {
  std::vector<Successor> out;
  for (std::size_t pos = 0; pos < form.size(); ++pos) {
    if (form[pos].is_terminal()) continue;
    for (const auto& p : component.productions) {
      if (p.lhs != form[pos]) continue;
      SententialForm next;
      next.reserve(form.size() + p.rhs.size() - 1);
      next.insert(next.end(), form.begin(), form.begin() + pos);
      next.insert(next.end(), p.rhs.begin(), p.rhs.end());
      next.insert(next.end(), form.begin() + pos + 1, form.end());
      out.push_back({std::move(next), p, pos});
    }
  }
  return out;
}

namespace {

struct BlockOutcome {
  SententialForm form;
  std::vector<RewriteStep> path;  // a minimal-length block reaching `form`
};

struct BlockResult {
  std::vector<BlockOutcome> outcomes;
  bool truncated = false;
};

// Layered search over single rewrites. Layer s holds the forms reachable in
// exactly s steps; once s reaches the mode's lower bound, a form already
// expanded has the same future and is not expanded again.
BlockResult derive_block(const Component& component, const SententialForm& start,
                         DerivationMode mode, DeriveBounds bounds) {
  struct Node {
    int parent;
    RewriteStep via;
  };
  std::vector<Node> nodes;
  std::vector<SententialForm> node_forms;

  bool bounded = mode.tag == ModeTag::Exactly || mode.tag == ModeTag::AtMost;
  int limit = bounded ? std::min(bounds.max_steps, mode.k) : bounds.max_steps;
  int memo_from = 0;
  switch (mode.tag) {
    case ModeTag::Terminal: memo_from = 0; break;
    case ModeTag::Star: memo_from = 1; break;
    case ModeTag::AtLeast: memo_from = mode.k; break;
    default: memo_from = limit + 1; break;
  }

  BlockResult result;
  std::map<SententialForm, int> accepted;
  std::set<SententialForm> expanded;

  std::map<SententialForm, int> layer;
  nodes.push_back({-1, {}});
  node_forms.push_back(start);
  layer.emplace(start, 0);
  if (memo_from == 0) expanded.insert(start);

  for (int s = 0; !layer.empty(); ++s) {
    std::map<SententialForm, int> next;
    for (const auto& [form, idx] : layer) {
      auto succ = step(component, form);
      if (mode.accepts(s, !succ.empty()) && !accepted.count(form)) {
        accepted.emplace(form, idx);
      }
      if (s == limit) {
        if (!succ.empty() && (!bounded || limit < mode.k)) {
          result.truncated = true;
        }
        continue;
      }
      for (auto& sc : succ) {
        // Rules never shrink a form, so nothing longer can come back.
        if (sc.form.size() > bounds.max_len) continue;
        if (s + 1 >= memo_from && !expanded.insert(sc.form).second) continue;
        if (next.count(sc.form)) continue;
        int child = static_cast<int>(nodes.size());
        nodes.push_back({idx, {std::move(sc.production), sc.position}});
        node_forms.push_back(sc.form);
        next.emplace(std::move(sc.form), child);
      }
    }
    layer = std::move(next);
  }

  for (const auto& [form, idx] : accepted) {
    BlockOutcome out{form, {}};
    for (int at = idx; nodes[at].parent >= 0; at = nodes[at].parent) {
      out.path.push_back(nodes[at].via);
    }
    std::reverse(out.path.begin(), out.path.end());
    result.outcomes.push_back(std::move(out));
  }
  return result;
}

// Best-first search over blackboard states by total rewrite count. Each
// state remembers the block that first reached it at minimal cost.
struct BlockSearch {
  struct Entry {
    int steps = 0;
    const SententialForm* parent = nullptr;
    TraceBlock block;
  };
  std::map<SententialForm, Entry> best;
  bool truncated = false;

  // Runs until the queue is exhausted or `target` is settled.
  void run(const Cdgs& g, const ModeAssignment& modes, std::size_t max_len,
           int max_steps, const SententialForm* target) {
    using Item = std::pair<int, SententialForm>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    SententialForm axiom{g.axiom()};
    best.emplace(axiom, Entry{});
    queue.emplace(0, axiom);
    while (!queue.empty()) {
      auto [steps, form] = queue.top();
      queue.pop();
      auto here = best.find(form);
      if (here->second.steps < steps) continue;
      if (target && form == *target) return;
      for (const auto& c : g.components()) {
        DerivationMode mode = modes.of(c.id);
        auto block = derive_block(c, form, mode,
                                  {max_steps - steps, max_len});
        truncated = truncated || block.truncated;
        for (auto& out : block.outcomes) {
          if (out.path.empty()) continue;  // vacuous t-block
          int total = steps + static_cast<int>(out.path.size());
          auto it = best.find(out.form);
          if (it != best.end() && it->second.steps <= total) continue;
          Entry e{total, &here->first,
                  TraceBlock{c.id, mode, std::move(out.path), out.form}};
          if (it == best.end()) {
            best.emplace(out.form, std::move(e));
          } else {
            it->second = std::move(e);
          }
          queue.emplace(total, std::move(out.form));
        }
      }
    }
  }
};

}  // namespace

DeriveResult derive_in_mode(const Component& component,
                            const SententialForm& form, DerivationMode mode,
                            DeriveBounds bounds) {
  auto block = derive_block(component, form, mode, bounds);
  DeriveResult result;
  result.truncated = block.truncated;
  for (auto& out : block.outcomes) result.forms.insert(std::move(out.form));
  return result;
}

std::vector<SententialForm> Language::sorted() const {
  std::vector<SententialForm> out(words.begin(), words.end());
  std::sort(out.begin(), out.end(), shortlex_less);
  return out;
}

Language enumerate_language(const Cdgs& g, const ModeAssignment& modes,
                            std::size_t max_len, int max_steps) {
  BlockSearch search;
  search.run(g, modes, max_len, max_steps, nullptr);
  Language lang;
  lang.truncated = search.truncated;
  for (const auto& [form, entry] : search.best) {
    if (is_terminal_form(form)) lang.words.insert(form);
  }
  return lang;
}

std::optional<DerivationTrace> membership(const Cdgs& g,
                                          const ModeAssignment& modes,
                                          const SententialForm& word,
                                          DeriveBounds bounds) {
  for (const auto& s : word) {
    if (!s.is_terminal()) {
      throw Error(ErrorCode::NonTerminalInput,
                  "word contains nonterminal '" + s.name + "'");
    }
  }
  if (word.empty()) return std::nullopt;
  BlockSearch search;
  search.run(g, modes, std::min(word.size(), bounds.max_len), bounds.max_steps,
             &word);
  auto it = search.best.find(word);
  if (it == search.best.end()) return std::nullopt;
  DerivationTrace trace;
  for (const auto* at = &*it; at->second.parent;
       at = &*search.best.find(*at->second.parent)) {
    trace.blocks.push_back(at->second.block);
  }
  std::reverse(trace.blocks.begin(), trace.blocks.end());
  return trace;
}

SententialForm apply_block(const Component& component, SententialForm form,
                           DerivationMode mode,
                           std::span<const RewriteStep> steps) {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& st = steps[i];
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::InvalidTrace,
                   "step " + std::to_string(i) + " of component '" +
                       component.id + "': " + why);
    };
    if (!component.contains(st.production)) {
      throw fail("production '" + to_string(st.production) +
                 "' is not in the component");
    }
    if (st.position >= form.size() || form[st.position] != st.production.lhs) {
      throw fail("'" + st.production.lhs.name + "' is not at position " +
                 std::to_string(st.position));
    }
    form.erase(form.begin() + st.position);
    form.insert(form.begin() + st.position, st.production.rhs.begin(),
                st.production.rhs.end());
  }
  if (!mode.accepts(static_cast<int>(steps.size()),
                    component.has_applicable_rule(form))) {
    throw Error(ErrorCode::InvalidTrace,
                "a block of " + std::to_string(steps.size()) +
                    " steps of component '" + component.id +
                    "' is not complete in mode " + to_string(mode));
  }
  return form;
}

SententialForm replay(const Cdgs& g, const DerivationTrace& trace) {
  SententialForm form{g.axiom()};
  for (std::size_t i = 0; i < trace.blocks.size(); ++i) {
    const auto& b = trace.blocks[i];
    form = apply_block(g.component(b.component_id), std::move(form), b.mode,
                       b.steps);
    if (form != b.result) {
      throw Error(ErrorCode::InvalidTrace,
                  "block " + std::to_string(i) + " yields '" + to_string(form) +
                      "', trace records '" + to_string(b.result) + "'");
    }
  }
  return form;
}

}  // namespace grice
