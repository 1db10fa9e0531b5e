#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "grice/error.h"
#include "grice/grammar.h"

namespace grice {

namespace {

struct Token {
  std::string text;
  int column = 0;  // 1-based
};

std::vector<Token> split_line(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[end]))) {
      ++end;
    }
    tokens.push_back({std::string(line.substr(i, end - i)),
                      static_cast<int>(i) + 1});
    i = end;
  }
  return tokens;
}

struct RawProduction {
  Token lhs;
  std::vector<Token> rhs;
  int line = 0;
};

struct RawComponent {
  Token id;
  int line = 0;
  std::vector<RawProduction> productions;
};

class GrammarReader {
 public:
  Cdgs read(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto tokens = split_line(line);
      if (!tokens.empty()) read_line(tokens);
    }
    return build();
  }

 private:
  Error error(ErrorCode code, const std::string& msg, int line, int col) {
    return Error(code, msg, SourceLocation{line, col});
  }

  void read_line(std::vector<Token>& tokens) {
    const Token& head = tokens.front();
    if (head.text == "component") {
      if (tokens.size() < 2) {
        throw error(ErrorCode::SyntaxError, "component needs an id", line_no_,
                    head.column);
      }
      // Accept both "component P1:" and "component P1 :".
      Token id = tokens[1];
      bool colon = false;
      if (id.text.ends_with(':')) {
        id.text.pop_back();
        colon = tokens.size() == 2;
      } else {
        colon = tokens.size() == 3 && tokens[2].text == ":";
      }
      if (!colon || id.text.empty()) {
        throw error(ErrorCode::SyntaxError,
                    "expected 'component <id>:'", line_no_, head.column);
      }
      components_.push_back({id, line_no_, {}});
      return;
    }
    for (const char* key : {"nonterminals", "terminals", "axiom", "mode"}) {
      std::string label = std::string(key) + ":";
      if (head.text.starts_with(label)) {
        std::vector<Token> values;
        if (head.text.size() > label.size()) {
          values.push_back({head.text.substr(label.size()),
                            head.column + static_cast<int>(label.size())});
        }
        values.insert(values.end(), tokens.begin() + 1, tokens.end());
        read_header(key, values, head.column);
        return;
      }
    }
    auto arrow = std::find_if(tokens.begin(), tokens.end(),
                              [](const Token& t) { return t.text == "->"; });
    if (arrow == tokens.end()) {
      throw error(ErrorCode::SyntaxError, "unrecognised line", line_no_,
                  head.column);
    }
    if (arrow != tokens.begin() + 1) {
      throw error(ErrorCode::SyntaxError,
                  "a production has exactly one left-hand symbol", line_no_,
                  head.column);
    }
    if (components_.empty()) {
      throw error(ErrorCode::SyntaxError, "production outside a component",
                  line_no_, head.column);
    }
    if (tokens.size() == 2) {
      throw error(ErrorCode::ErasingRuleRejected,
                  "erasing rule '" + head.text + " ->' is not supported",
                  line_no_, arrow->column);
    }
    RawProduction p{head, {tokens.begin() + 2, tokens.end()}, line_no_};
    components_.back().productions.push_back(std::move(p));
  }

  void read_header(const std::string& key, const std::vector<Token>& values,
                   int column) {
    if (seen_headers_.count(key)) {
      throw error(ErrorCode::SyntaxError, "repeated '" + key + ":' line",
                  line_no_, column);
    }
    seen_headers_.insert(key);
    if (key == "nonterminals" || key == "terminals") {
      auto kind = key == "terminals" ? SymbolKind::Terminal
                                     : SymbolKind::Nonterminal;
      for (const auto& t : values) {
        if (!is_valid_symbol_name(t.text)) {
          throw error(ErrorCode::SyntaxError,
                      "bad symbol name '" + t.text + "'", line_no_, t.column);
        }
        if (declared_.count(t.text)) {
          throw error(ErrorCode::SyntaxError,
                      "symbol '" + t.text + "' declared twice", line_no_,
                      t.column);
        }
        declared_.emplace(t.text, kind);
        (kind == SymbolKind::Terminal ? terminals_ : nonterminals_)
            .push_back(Symbol{t.text, kind});
      }
      return;
    }
    if (values.size() != 1) {
      throw error(ErrorCode::SyntaxError, "'" + key + ":' takes one value",
                  line_no_, column);
    }
    if (key == "axiom") {
      axiom_ = values[0];
      axiom_line_ = line_no_;
    } else {
      try {
        mode_ = parse_mode(values[0].text);
      } catch (const Error& e) {
        throw error(ErrorCode::SyntaxError, e.what(), line_no_,
                    values[0].column);
      }
    }
  }

  Symbol resolve(const Token& t, int line) {
    auto it = declared_.find(t.text);
    if (it == declared_.end()) {
      throw error(ErrorCode::UndeclaredSymbol,
                  "undeclared symbol '" + t.text + "'", line, t.column);
    }
    return Symbol{t.text, it->second};
  }

  Cdgs build() {
    int eof = line_no_ + 1;
    for (const char* key : {"nonterminals", "terminals", "axiom"}) {
      if (!seen_headers_.count(key)) {
        throw error(ErrorCode::SyntaxError,
                    "missing '" + std::string(key) + ":' line", eof, 0);
      }
    }
    Symbol axiom = resolve(axiom_, axiom_line_);
    if (axiom.is_terminal()) {
      throw error(ErrorCode::SyntaxError, "axiom must be a nonterminal",
                  axiom_line_, axiom_.column);
    }
    if (components_.empty()) {
      throw error(ErrorCode::EmptyComponent, "no components declared", eof, 0);
    }
    std::map<std::string, int> ids;
    std::vector<Component> components;
    for (const auto& rc : components_) {
      if (auto [it, fresh] = ids.emplace(rc.id.text, rc.line); !fresh) {
        throw error(ErrorCode::DuplicateComponentId,
                    "component '" + rc.id.text + "' already declared on line " +
                        std::to_string(it->second),
                    rc.line, rc.id.column);
      }
      if (rc.productions.empty()) {
        throw error(ErrorCode::EmptyComponent,
                    "component '" + rc.id.text + "' has no productions",
                    rc.line, rc.id.column);
      }
      Component c{rc.id.text, {}};
      for (const auto& rp : rc.productions) {
        Production p{resolve(rp.lhs, rp.line), {}};
        if (p.lhs.is_terminal()) {
          throw error(ErrorCode::SyntaxError,
                      "left-hand side '" + rp.lhs.text + "' is a terminal",
                      rp.line, rp.lhs.column);
        }
        for (const auto& t : rp.rhs) p.rhs.push_back(resolve(t, rp.line));
        if (c.contains(p)) {
          throw error(ErrorCode::SyntaxError,
                      "duplicate production '" + to_string(p) + "'", rp.line,
                      rp.lhs.column);
        }
        c.productions.push_back(std::move(p));
      }
      components.push_back(std::move(c));
    }
    return Cdgs(nonterminals_, terminals_, axiom, std::move(components),
                mode_);
  }

  int line_no_ = 0;
  std::set<std::string> seen_headers_;
  std::map<std::string, SymbolKind> declared_;
  std::vector<Symbol> nonterminals_;
  std::vector<Symbol> terminals_;
  Token axiom_;
  int axiom_line_ = 0;
  DerivationMode mode_ = DerivationMode::terminal();
  std::vector<RawComponent> components_;
};

}  // namespace

Cdgs parse_grammar(std::string_view text) { return GrammarReader().read(text); }

Cdgs load_grammar_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot read grammar file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grammar(buf.str());
}

}  // namespace grice
