#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mgl/cas.hpp"
#include "mgl/engine.hpp"
#include "mgl/error.hpp"
#include "mgl/session.hpp"
#include "mgl/word_problem.hpp"

namespace mgl {

using json = nlohmann::ordered_json;

struct Config {
  std::filesystem::path grammar_dir;
  std::vector<std::string> languages = kShippedLanguages;
  std::string default_from = "eng";
  std::string backend = "builtin";  // or "external:<host>:<port>"
  std::string listen_address = "127.0.0.1:8080";
  std::filesystem::path lexicon;    // empty: <grammar_dir>/lexicon.txt

  /// Throws ConfigError when languages or defaultFrom are out of range.
  void validate() const;
  std::string backend_host() const;
  std::string backend_port() const;
  std::string listen_host() const;
  int listen_port() const;
  std::filesystem::path lexicon_path() const;
};

/// `key = value` lines, '#' comments. Relative paths are resolved against
/// `base`. Throws ConfigError.
Config parse_config(std::istream& in, const std::filesystem::path& base = {});
Config load_config(const std::filesystem::path& path);

/// `{"ctor": name, "children": [...]}`, leaves `{"int": n}` / `{"var": "x"}`.
json tree_to_json(const Tree& t);
/// Variable leaves take their category from the enclosing constructor;
/// `root` names it for a bare leaf. Throws SyntaxError and the typecheck errors.
Tree tree_from_json(const json& j, const AbstractGrammar& g, const Category& root = "VarNum");

json error_to_json(const Error& e);
int http_status(Errc code);

/// Every service operation on JSON values, independent of the transport.
class Api {
 public:
  explicit Api(Config config, std::chrono::minutes session_ttl = std::chrono::minutes(30));
  ~Api();

  const Config& config() const { return config_; }
  const Engine& engine() const { return *engine_; }
  const Evaluator& evaluator() const { return *evaluator_; }
  const Lexicon& lexicon() const { return *lexicon_; }

  json languages() const;
  json parse(const json& req) const;
  json linearize(const json& req) const;
  json translate(const json& req) const;
  json complete(const json& req) const;
  json command(const json& req);
  json wordproblem(const json& req) const;

  struct Response {
    int status = 200;
    std::string body;
  };
  /// Dispatches `method path` with a JSON body; errors become JSON payloads.
  Response handle(const std::string& method, const std::string& path, const std::string& body);

  std::size_t session_count() const;
  /// Session for the REPL and tests; backend from the config.
  std::unique_ptr<Session> new_session() const;

 private:
  struct SessionSlot {
    std::mutex lock;
    std::unique_ptr<Session> session;
    std::chrono::steady_clock::time_point last_used;
  };

  std::string issue_token();

  Config config_;
  std::chrono::minutes ttl_;
  std::unique_ptr<Engine> engine_;
  std::unique_ptr<ConcreteGrammar> cas_;
  std::unique_ptr<Evaluator> evaluator_;
  std::unique_ptr<Lexicon> lexicon_;
  mutable std::mutex sessions_lock_;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
};

/// HTTP front end for an Api, served from a background thread.
class HttpServer {
 public:
  explicit HttpServer(Api& api);
  ~HttpServer();

  /// Binds `host:port` (port 0 picks a free one) and starts serving.
  /// Returns the bound port. Throws ConfigError when binding fails.
  int start(const std::string& host, int port);
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Interactive loop: `sage> ` prompt, one Command per line.
/// With `echo`, input lines are written after the prompt (scripted runs).
void run_repl(const Engine& engine, Session& session, const std::string& lang, std::istream& in, std::ostream& out,
              bool echo);

}  // namespace mgl
