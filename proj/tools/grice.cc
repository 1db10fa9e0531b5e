// grice: dialogue service, transcript auditing, grammar and topic-model tools.
//
// Exit codes: 0 ok, 1 domain-negative answer, 2 startup failure, 64 usage,
// 65 input data error.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "grice/error.h"
#include "grice/service.h"
#include "grice/text.h"

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kStartup = 2;
constexpr int kUsage = 64;
constexpr int kDataError = 65;

int fail(int code, const std::string& message) {
  std::cerr << "grice: " << message << '\n';
  return code;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw grice::Error(grice::ErrorCode::IoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct GrammarArgs {
  std::string grammar;
  std::string mode;
  std::vector<std::string> component_modes;  // id=mode
  int max_steps = 0;
};

grice::ModeAssignment modes_for(const grice::Cdgs& g, const GrammarArgs& a) {
  grice::ModeAssignment m(a.mode.empty() ? g.default_mode()
                                         : grice::parse_mode(a.mode));
  for (const auto& spec : a.component_modes) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw grice::Error(grice::ErrorCode::BadRequest,
                         "--component-mode expects ID=MODE, got '" + spec + "'");
    }
    const auto id = spec.substr(0, eq);
    if (!g.find_component(id)) {
      throw grice::Error(grice::ErrorCode::BadRequest, "no component '" + id + "'");
    }
    m.set(id, grice::parse_mode(spec.substr(eq + 1)));
  }
  return m;
}

void print_trace(const grice::Cdgs& g, const grice::DerivationTrace& trace) {
  std::cout << g.axiom().name << '\n';
  for (const auto& b : trace.blocks) {
    std::cout << "=[" << b.component_id << ' ' << grice::to_string(b.mode)
              << "]=> " << grice::to_string(b.result) << '\n';
    for (const auto& s : b.steps) {
      std::cout << "    " << grice::to_string(s.production) << " @ "
                << s.position << '\n';
    }
  }
}

volatile std::sig_atomic_t g_stop_requested = 0;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gricean dialogue monitoring over grammar systems"};
  app.require_subcommand(1);

  // serve
  std::string config_path;
  std::string bind_override, data_dir_override;
  int port_override = -1;
  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON dialogue service");
  serve->add_option("--config", config_path, "Server config (JSON)");
  serve->add_option("--bind", bind_override, "Bind address");
  serve->add_option("--port", port_override, "Port (0 picks a free one)")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--data-dir", data_dir_override, "Trace directory");

  // audit
  std::string transcript_path, format = "json", output_path, topic_model_override;
  auto* audit = app.add_subcommand("audit", "Audit a transcript for maxim breaches");
  audit->add_option("transcript", transcript_path, "Transcript (JSON lines)")
      ->required();
  audit->add_option("--config", config_path, "Server config (JSON)");
  audit->add_option("--topic-model", topic_model_override, "Topic model file");
  audit->add_option("--format", format, "json, text, or both")
      ->check(CLI::IsMember({"json", "text", "both"}));
  audit->add_option("--output", output_path, "Write the report here");

  // grammar
  GrammarArgs ga;
  std::size_t max_len = 9;
  std::string word, form, component;
  std::uint64_t cap = std::uint64_t{1} << 62;
  auto* grammar = app.add_subcommand("grammar", "Grammar system tools");
  grammar->require_subcommand(1);
  auto add_grammar_opts = [&](CLI::App* c) {
    c->add_option("--grammar", ga.grammar, "Grammar file")->required();
    c->add_option("--mode", ga.mode, "Mode for every component: * t =k <=k >=k");
    c->add_option("--component-mode", ga.component_modes,
                  "Per-component mode, ID=MODE");
    c->add_option("--max-steps", ga.max_steps, "Bound on total rewrites")
        ->check(CLI::PositiveNumber);
  };
  auto* enumerate = grammar->add_subcommand("enumerate", "Print the language");
  add_grammar_opts(enumerate);
  enumerate->add_option("--max-len", max_len, "Longest word")->required()
      ->check(CLI::PositiveNumber);
  auto* member = grammar->add_subcommand("member", "Test membership, print a witness");
  add_grammar_opts(member);
  member->add_option("--word", word, "Terminal word")->required();
  auto* derive = grammar->add_subcommand("derive", "Print every block successor of a form");
  add_grammar_opts(derive);
  derive->add_option("--form", form, "Sentential form")->required();
  derive->add_option("--component", component, "Component (default: all)");
  derive->add_option("--max-len", max_len, "Longest successor");
  auto* count = grammar->add_subcommand("count", "Count parse trees of a word");
  count->add_option("--grammar", ga.grammar, "Grammar file")->required();
  count->add_option("--word", word, "Terminal word")->required();
  count->add_option("--cap", cap, "Saturation cap")->check(CLI::Range(
      std::uint64_t{2}, std::numeric_limits<std::uint64_t>::max()));

  // lda
  std::string corpus_path, model_path, out_path, text;
  grice::LdaConfig lda;
  int infer_sweeps = 50;
  auto* ldacmd = app.add_subcommand("lda", "Topic model tools");
  ldacmd->require_subcommand(1);
  auto* train = ldacmd->add_subcommand("train", "Train a topic model");
  train->add_option("--corpus", corpus_path, "One document per line")->required();
  train->add_option("--out", out_path, "Model file to write")->required();
  train->add_option("--topics", lda.topics, "Number of topics");
  train->add_option("--alpha", lda.alpha, "Document-topic prior");
  train->add_option("--beta", lda.beta, "Topic-word prior");
  train->add_option("--sweeps", lda.sweeps, "Gibbs sweeps");
  train->add_option("--burn-in", lda.burn_in, "Sweeps discarded before averaging");
  train->add_option("--seed", lda.seed, "Random seed");
  auto* infer = ldacmd->add_subcommand("infer", "Print a document's topic mix");
  infer->add_option("--model", model_path, "Model file")->required();
  auto* text_opt = infer->add_option("--text", text, "Document text");
  infer->add_option("--doc-file", corpus_path, "Read the document from a file")
      ->excludes(text_opt);
  infer->add_option("--sweeps", infer_sweeps, "Gibbs sweeps")->check(CLI::PositiveNumber);
  infer->add_option("--seed", lda.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  using grice::Error;
  using grice::ErrorCode;

  if (serve->parsed()) {
    std::unique_ptr<grice::DialogueService> service;
    grice::ServerConfig cfg;
    try {
      cfg = config_path.empty() ? grice::ServerConfig{}
                                : grice::load_server_config(config_path);
      if (!bind_override.empty()) cfg.bind_address = bind_override;
      if (port_override >= 0) cfg.port = port_override;
      if (!data_dir_override.empty()) cfg.data_dir = data_dir_override;
      service = std::make_unique<grice::DialogueService>(cfg, grice::load_models(cfg));
    } catch (const std::exception& e) {
      return fail(kStartup, e.what());
    }
    sigset_t stop_signals;
    sigemptyset(&stop_signals);
    sigaddset(&stop_signals, SIGINT);
    sigaddset(&stop_signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);
    std::thread waiter([&] {
      int sig = 0;
      sigwait(&stop_signals, &sig);
      g_stop_requested = 1;
      grice::stop_server();
    });
    waiter.detach();
    const bool ok = grice::run_server(
        *service, cfg.bind_address, cfg.port, [&](int port) {
          std::cout << "listening on " << cfg.bind_address << ':' << port
                    << std::endl;
        });
    if (!ok && !g_stop_requested) {
      return fail(kStartup, "cannot listen on " + cfg.bind_address + ":" +
                                std::to_string(cfg.port));
    }
    return kOk;
  }

  if (audit->parsed()) {
    grice::ServerConfig cfg;
    grice::DialogueModels models;
    try {
      if (!config_path.empty()) cfg = grice::load_server_config(config_path);
      if (!topic_model_override.empty()) cfg.topic_model_path = topic_model_override;
      models = grice::load_models(cfg);
    } catch (const std::exception& e) {
      return fail(kStartup, e.what());
    }
    try {
      const auto transcript = grice::load_transcript(transcript_path);
      const auto report = grice::audit_transcript(transcript, cfg.dialogue, models);
      std::string out;
      if (format != "text") out += report.to_json().dump(2) + "\n";
      if (format != "json") out += report.to_text();
      if (output_path.empty()) {
        std::cout << out;
      } else {
        std::ofstream f(output_path, std::ios::binary);
        f << out;
        if (!f) return fail(kDataError, "cannot write " + output_path);
      }
      return kOk;
    } catch (const Error& e) {
      const std::string where =
          e.where() ? transcript_path + ":" + std::to_string(e.where()->line) + ": "
                    : std::string();
      return fail(kDataError, where + e.what());
    }
  }

  if (grammar->parsed()) {
    std::optional<grice::Cdgs> g;
    try {
      g = grice::load_grammar_file(ga.grammar);
    } catch (const Error& e) {
      return fail(kDataError, ga.grammar + ": " + e.what());
    }
    std::optional<grice::ModeAssignment> parsed_modes;
    try {
      parsed_modes = modes_for(*g, ga);
    } catch (const Error& e) {
      return fail(kUsage, e.what());
    }
    const auto& modes = *parsed_modes;
    try {
      if (count->parsed()) {
        auto words = g->read_form(word);
        std::vector<std::string> names;
        for (const auto& s : words) names.push_back(s.name);
        const auto n = grice::count_parse_trees(g->merged(), names, cap);
        std::cout << n << (n == cap ? " (saturated)" : "") << '\n';
        return n > 0 ? kOk : kNegative;
      }
      if (enumerate->parsed()) {
        const int steps = ga.max_steps > 0 ? ga.max_steps
                                           : static_cast<int>(8 * max_len + 16);
        const auto lang = grice::enumerate_language(*g, modes, max_len, steps);
        for (const auto& w : lang.sorted()) std::cout << grice::to_string(w) << '\n';
        if (lang.truncated) {
          std::cerr << "grice: search stopped at " << steps
                    << " rewrites; raise --max-steps for a complete list\n";
        }
        return kOk;
      }
      if (member->parsed()) {
        const auto w = g->read_form(word);
        grice::DeriveBounds bounds;
        bounds.max_len = w.size();
        bounds.max_steps = ga.max_steps > 0 ? ga.max_steps
                                            : static_cast<int>(8 * w.size() + 16);
        auto trace = grice::membership(*g, modes, w, bounds);
        if (!trace) {
          std::cout << "not derivable\n";
          return kNegative;
        }
        print_trace(*g, *trace);
        return kOk;
      }
      if (derive->parsed()) {
        const auto start = g->read_form(form);
        grice::DeriveBounds bounds;
        bounds.max_len = std::max<std::size_t>(max_len, start.size() + 16);
        if (ga.max_steps > 0) bounds.max_steps = ga.max_steps;
        bool truncated = false;
        for (const auto& c : g->components()) {
          if (!component.empty() && c.id != component) continue;
          const auto r = grice::derive_in_mode(c, start, modes.of(c.id), bounds);
          truncated = truncated || r.truncated;
          std::vector<grice::SententialForm> forms(r.forms.begin(), r.forms.end());
          std::sort(forms.begin(), forms.end(), grice::shortlex_less);
          for (const auto& f : forms) {
            std::cout << c.id << ": " << grice::to_string(f) << '\n';
          }
        }
        if (!component.empty() && !g->find_component(component)) {
          return fail(kUsage, "no component '" + component + "'");
        }
        if (truncated) std::cerr << "grice: search bounds reached\n";
        return kOk;
      }
    } catch (const Error& e) {
      return fail(kDataError, e.what());
    }
  }

  if (ldacmd->parsed()) {
    try {
      if (train->parsed()) {
        lda.validate();
        const auto corpus = grice::Corpus::from_file(corpus_path);
        grice::save_topic_model(grice::train(corpus, lda), out_path);
        return kOk;
      }
      if (infer->parsed()) {
        const auto model = grice::load_topic_model(model_path);
        if (!corpus_path.empty()) text = read_text(corpus_path);
        const auto theta = grice::infer_words(
            model, grice::tokenize_words(text), infer_sweeps, lda.seed);
        std::cout << grice::json(theta).dump() << '\n';
        return kOk;
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigInvalid) return fail(kUsage, e.what());
      return fail(kDataError, e.what());
    }
  }
  return kUsage;
}
