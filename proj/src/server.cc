#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "grice/error.h"
#include "grice/service.h"
#include "httplib.h"

namespace grice {

namespace {

bool valid_dialogue_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

// Appends and fsyncs, so an acknowledged turn survives a crash.
void append_durably(const std::filesystem::path& path, std::string_view data,
                    bool create_new) {
  int flags = O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC;
  if (create_new) flags |= O_EXCL;
  int fd = ::open(path.c_str(), flags, 0644);
  if (fd < 0) {
    if (create_new && errno == EEXIST) {
      throw Error(ErrorCode::DialogueExists, "dialogue trace already exists");
    }
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  while (!data.empty()) {
    ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  ::fsync(fd);
  ::close(fd);
}

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch())
      .count();
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::BadRequest, std::string("body is not JSON: ") + e.what());
  }
}

}  // namespace

void FifoMutex::lock() {
  std::unique_lock lk(m_);
  const auto ticket = next_++;
  cv_.wait(lk, [&] { return serving_ == ticket; });
}

void FifoMutex::unlock() {
  {
    std::lock_guard lk(m_);
    ++serving_;
  }
  cv_.notify_all();
}

std::string new_uuid() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::uint64_t hi, lo;
  {
    std::lock_guard lk(mu);
    hi = rng();
    lo = rng();
  }
  hi = (hi & ~0xF000ull) | 0x4000ull;
  lo = (lo & ~(3ull << 62)) | (2ull << 62);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%08llx-%04llx-%04llx-%04llx-%012llx",
                static_cast<unsigned long long>(hi >> 32),
                static_cast<unsigned long long>((hi >> 16) & 0xFFFF),
                static_cast<unsigned long long>(hi & 0xFFFF),
                static_cast<unsigned long long>(lo >> 48),
                static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFull));
  return buf;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadRequest:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::UnknownParticipant:
    case ErrorCode::TranscriptMalformed:
      return 400;
    case ErrorCode::DialogueNotFound:
      return 404;
    case ErrorCode::DialogueExists:
    case ErrorCode::NotYourTurn:
      return 409;
    case ErrorCode::ModelMissing:
      return 503;
    default:
      return 500;
  }
}

json error_json(const Error& e) {
  return {{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}};
}

DialogueService::DialogueService(ServerConfig cfg, DialogueModels models)
    : cfg_(std::move(cfg)), models_(std::move(models)) {
  std::error_code ec;
  std::filesystem::create_directories(cfg_.data_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg_.data_dir)) {
    throw Error(ErrorCode::IoError,
                "cannot create data directory " + cfg_.data_dir.string());
  }
}

std::filesystem::path DialogueService::trace_path(const std::string& id) const {
  return cfg_.data_dir / (id + ".jsonl");
}

std::shared_ptr<DialogueService::Session> DialogueService::session(
    const std::string& id, bool create) {
  if (!valid_dialogue_id(id)) {
    throw Error(create ? ErrorCode::BadRequest : ErrorCode::DialogueNotFound,
                "invalid dialogue id '" + id + "'");
  }
  std::lock_guard lk(sessions_mu_);
  auto it = sessions_.find(id);
  if (it != sessions_.end()) return it->second;
  if (!create && !std::filesystem::exists(trace_path(id))) {
    throw Error(ErrorCode::DialogueNotFound, "no dialogue '" + id + "'");
  }
  auto s = std::make_shared<Session>();
  sessions_.emplace(id, s);
  return s;
}

DialogueState& DialogueService::loaded(Session& s, const std::string& id) {
  if (s.state) return *s.state;
  const auto path = trace_path(id);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::DialogueNotFound, "no dialogue '" + id + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string doc = buf.str();
  // A record without its newline was never acknowledged; drop it.
  if (!doc.empty() && doc.back() != '\n') {
    doc.erase(doc.rfind('\n') == std::string::npos ? 0 : doc.rfind('\n') + 1);
    std::filesystem::resize_file(path, doc.size());
  }
  s.state = replay_trace(doc, *models_.grammar);
  return *s.state;
}

json DialogueService::create_dialogue(const json& body) {
  if (!body.is_object()) throw Error(ErrorCode::BadRequest, "body must be an object");
  for (const auto& [key, value] : body.items()) {
    if (key != "id" && key != "config") {
      throw Error(ErrorCode::BadRequest, "unknown field '" + key + "'");
    }
  }
  std::string id;
  if (body.contains("id")) {
    if (!body["id"].is_string()) throw Error(ErrorCode::BadRequest, "id must be a string");
    id = body["id"].get<std::string>();
    if (!valid_dialogue_id(id)) {
      throw Error(ErrorCode::BadRequest,
                  "dialogue ids are 1-64 characters from [A-Za-z0-9_-]");
    }
  } else {
    id = new_uuid();
  }
  const json overrides = body.value("config", json(nullptr));
  auto state = new_dialogue(id, apply_overrides(cfg_.dialogue, overrides), models_);

  std::lock_guard lk(sessions_mu_);
  if (sessions_.count(id) || std::filesystem::exists(trace_path(id))) {
    throw Error(ErrorCode::DialogueExists, "dialogue '" + id + "' exists");
  }
  append_durably(trace_path(id), serialize_trace(state), true);
  auto s = std::make_shared<Session>();
  s->state = std::move(state);
  sessions_.emplace(id, s);
  return {{"id", id}};
}

json DialogueService::post_turn(const std::string& id, const json& body) {
  auto s = session(id, false);
  if (!body.is_object()) throw Error(ErrorCode::BadRequest, "body must be an object");
  Utterance u;
  if (!body.contains("speaker") || !body["speaker"].is_string()) {
    throw Error(ErrorCode::BadRequest, "turn needs a string 'speaker'");
  }
  if (!body.contains("text") || !body["text"].is_string()) {
    throw Error(ErrorCode::BadRequest, "turn needs a string 'text'");
  }
  u.speaker = body["speaker"].get<std::string>();
  u.text = body["text"].get<std::string>();
  if (body.contains("assertions")) {
    if (!body["assertions"].is_array()) {
      throw Error(ErrorCode::BadRequest, "assertions must be an array");
    }
    for (const auto& a : body["assertions"]) u.assertions.push_back(assertion_from_json(a));
  }
  if (body.contains("timestamp")) {
    if (!body["timestamp"].is_number_integer()) {
      throw Error(ErrorCode::BadRequest, "timestamp must be an integer");
    }
    u.timestamp = body["timestamp"].get<std::int64_t>();
  } else {
    u.timestamp = now_ms();
  }

  std::lock_guard lk(s->lock);
  DialogueState& state = loaded(*s, id);
  auto outcome = handle_turn(state, u, models_);
  append_durably(trace_path(id), to_json(outcome.turn).dump() + "\n", false);
  state = std::move(outcome.state);

  json out = annotation_json(outcome.turn);
  out["reply"] = outcome.turn.reply ? to_json(*outcome.turn.reply) : json(nullptr);
  json reply_breaches = json::array();
  for (const auto& e : outcome.turn.reply_breaches) reply_breaches.push_back(to_json(e));
  out["replyBreaches"] = reply_breaches;
  return out;
}

json DialogueService::get_dialogue(const std::string& id) {
  auto s = session(id, false);
  std::lock_guard lk(s->lock);
  const DialogueState& state = loaded(*s, id);
  json turns = json::array();
  for (const auto& t : state.turns) turns.push_back(to_json(t));
  return {{"header", header_json(state)}, {"turns", turns}};
}

json DialogueService::get_topics(const std::string& id) {
  auto s = session(id, false);
  std::lock_guard lk(s->lock);
  const DialogueState& state = loaded(*s, id);
  return {{"contextTheta", state.context_theta ? json(*state.context_theta)
                                               : json::array()},
          {"topicStack", state.topic_stack}};
}

namespace {

std::atomic<httplib::Server*> g_server{nullptr};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_json(res, http_status(e.code()), error_json(e));
    } catch (const std::exception& e) {
      send_json(res, 500,
                {{"error", {{"code", "Internal"}, {"message", e.what()}}}});
    }
  };
}

}  // namespace

bool run_server(DialogueService& service, const std::string& host, int port,
                const std::function<void(int)>& on_listening,
                std::ostream* log) {
  httplib::Server svr;
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  if (log) {
    svr.set_logger([log](const httplib::Request& req, const httplib::Response& res) {
      static std::mutex mu;
      std::lock_guard lk(mu);
      *log << req.method << ' ' << req.path << ' ' << res.status << '\n';
    });
  }

  svr.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  svr.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });
  svr.Post("/v1/dialogues",
           guarded([&](const httplib::Request& req, httplib::Response& res) {
             send_json(res, 201, service.create_dialogue(parse_body(req.body)));
           }));
  svr.Post(R"(/v1/dialogues/([^/]+)/turns)",
           guarded([&](const httplib::Request& req, httplib::Response& res) {
             send_json(res, 200,
                       service.post_turn(req.matches[1], parse_body(req.body)));
           }));
  svr.Get(R"(/v1/dialogues/([^/]+)/topics)",
          guarded([&](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, service.get_topics(req.matches[1]));
          }));
  svr.Get(R"(/v1/dialogues/([^/]+))",
          guarded([&](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, service.get_dialogue(req.matches[1]));
          }));
  svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      send_json(res, res.status,
                {{"error", {{"code", res.status == 404 ? "NotFound" : "HttpError"},
                            {"message", "no such route"}}}});
    }
  });

  int bound = port;
  if (port == 0) {
    bound = svr.bind_to_any_port(host);
    if (bound < 0) return false;
  } else if (!svr.bind_to_port(host, port)) {
    return false;
  }
  g_server = &svr;
  if (on_listening) on_listening(bound);
  const bool ok = svr.listen_after_bind();
  g_server = nullptr;
  return ok;
}

void stop_server() {
  if (auto* s = g_server.load()) s->stop();
}

}  // namespace grice
