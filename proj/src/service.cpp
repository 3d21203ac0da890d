#include "mgl/service.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <httplib.h>

namespace mgl {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

// "host:port" -> {host, port}
std::pair<std::string, std::string> split_address(const std::string& addr, const std::string& key) {
  auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == addr.size())
    throw Error(Errc::ConfigError, key + " must be host:port, got '" + addr + "'", {{"key", key}, {"value", addr}});
  return {addr.substr(0, colon), addr.substr(colon + 1)};
}

Error bad_request(const std::string& what) { return Error(Errc::SyntaxError, what, {{"field", what}}); }

const json& field(const json& req, const char* name) {
  if (!req.is_object() || !req.contains(name)) throw bad_request(std::string("missing field '") + name + "'");
  return req.at(name);
}

std::string string_field(const json& req, const char* name) {
  const json& v = field(req, name);
  if (!v.is_string()) throw bad_request(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

std::string string_field(const json& req, const char* name, const std::string& fallback) {
  if (!req.is_object() || !req.contains(name) || req.at(name).is_null()) return fallback;
  return string_field(req, name);
}

std::vector<std::string> language_list(const json& v) {
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) throw bad_request("languages must be a string or a list");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) throw bad_request("languages must be strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

json renderings(const Translation& t) {
  json out = json::object();
  for (const auto& [lang, text] : t.renderings) out[lang] = text;
  return out;
}

}  // namespace

// ---------------------------------------------------------------- config

void Config::validate() const {
  if (grammar_dir.empty()) throw Error(Errc::ConfigError, "grammarDir is not set", {{"key", "grammarDir"}});
  if (languages.empty()) throw Error(Errc::ConfigError, "no languages configured", {{"key", "languages"}});
  for (const auto& l : languages)
    if (std::find(kShippedLanguages.begin(), kShippedLanguages.end(), l) == kShippedLanguages.end())
      throw Error(Errc::ConfigError, "unknown language " + l, {{"key", "languages"}, {"value", l}});
  if (std::find(languages.begin(), languages.end(), default_from) == languages.end())
    throw Error(Errc::ConfigError, "defaultFrom " + default_from + " is not among the languages",
                {{"key", "defaultFrom"}, {"value", default_from}});
  if (backend != "builtin") {
    if (!backend.starts_with("external:"))
      throw Error(Errc::ConfigError, "backend must be builtin or external:host:port", {{"key", "backend"}});
    split_address(backend.substr(9), "backend");
  }
  listen_port();
}

std::string Config::backend_host() const { return split_address(backend.substr(9), "backend").first; }
std::string Config::backend_port() const { return split_address(backend.substr(9), "backend").second; }
std::string Config::listen_host() const { return split_address(listen_address, "listenAddress").first; }

int Config::listen_port() const {
  std::string p = split_address(listen_address, "listenAddress").second;
  if (p.find_first_not_of("0123456789") != std::string::npos || p.size() > 5 || std::stoi(p) > 65535)
    throw Error(Errc::ConfigError, "bad port in listenAddress: " + p, {{"key", "listenAddress"}, {"value", p}});
  return std::stoi(p);
}

std::filesystem::path Config::lexicon_path() const { return lexicon.empty() ? grammar_dir / "lexicon.txt" : lexicon; }

Config parse_config(std::istream& in, const std::filesystem::path& base) {
  Config c;
  auto path = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_relative() && !base.empty() ? base / p : p;
  };
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::ConfigError, "line " + std::to_string(no) + ": expected key=value", {{"line", std::to_string(no)}});
    std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    if (key == "grammarDir") c.grammar_dir = path(value);
    else if (key == "languages") c.languages = split_list(value);
    else if (key == "defaultFrom") c.default_from = value;
    else if (key == "backend") c.backend = value;
    else if (key == "listenAddress") c.listen_address = value;
    else if (key == "lexicon") c.lexicon = path(value);
    else
      throw Error(Errc::ConfigError, "line " + std::to_string(no) + ": unknown key " + key,
                  {{"line", std::to_string(no)}, {"key", key}});
  }
  return c;
}

Config load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::IoError, "cannot read " + file.string(), {{"path", file.string()}});
  return parse_config(in, file.parent_path());
}

// ---------------------------------------------------------------- json

json tree_to_json(const Tree& t) {
  if (t.is_integer_leaf()) {
    const std::string& d = t.token();
    if (d.size() <= 18) return json{{"int", std::stoll(d)}};
    return json{{"int", d}};
  }
  if (t.is_variable_leaf()) return json{{"var", t.token()}};
  json kids = json::array();
  for (const auto& c : t.children()) kids.push_back(tree_to_json(c));
  return json{{"ctor", t.ctor()}, {"children", kids}};
}

namespace {

Tree from_json(const json& j, const AbstractGrammar& g, const Category& expected) {
  if (!j.is_object()) throw Error(Errc::SyntaxError, "tree nodes must be objects", {{"found", j.dump()}});
  if (j.contains("int")) {
    const json& v = j.at("int");
    if (v.is_number_unsigned()) return Tree::integer(std::to_string(v.get<unsigned long long>()));
    if (v.is_number_integer() && v.get<long long>() >= 0) return Tree::integer(std::to_string(v.get<long long>()));
    if (v.is_string()) return Tree::integer(v.get<std::string>());
    throw Error(Errc::InvalidLeaf, "bad integer leaf " + v.dump(), {{"found", v.dump()}});
  }
  if (j.contains("var")) {
    const json& v = j.at("var");
    if (!v.is_string()) throw Error(Errc::InvalidLeaf, "bad variable leaf " + v.dump(), {{"found", v.dump()}});
    return Tree::variable(v.get<std::string>(), expected);
  }
  if (!j.contains("ctor") || !j.at("ctor").is_string())
    throw Error(Errc::SyntaxError, "tree node without ctor", {{"found", j.dump()}});
  std::string name = j.at("ctor").get<std::string>();
  const ConstructorDecl* decl = g.find(name);
  if (!decl) throw Error(Errc::UnknownConstructor, "unknown constructor " + name, {{"name", name}});
  std::vector<Tree> kids;
  if (j.contains("children")) {
    const json& cs = j.at("children");
    if (!cs.is_array()) throw Error(Errc::SyntaxError, "children must be a list", {{"ctor", name}});
    for (std::size_t i = 0; i < cs.size(); ++i)
      kids.push_back(from_json(cs[i], g, i < decl->arity() ? decl->arg_cats[i] : Category("VarNum")));
  }
  return Tree::node(name, std::move(kids));
}

}  // namespace

Tree tree_from_json(const json& j, const AbstractGrammar& g, const Category& root) {
  Tree t = from_json(j, g, root);
  typecheck(t, g);
  return t;
}

json error_to_json(const Error& e) {
  json info = json::object();
  for (const auto& [k, v] : e.info()) info[k] = v;
  return json{{"error", to_string(e.code())}, {"message", e.what()}, {"info", info}};
}

int http_status(Errc code) {
  switch (code) {
    case Errc::UnknownLanguage: return 404;
    case Errc::BackendTimeout: return 504;
    case Errc::BackendError: return 502;
    case Errc::ConfigError:
    case Errc::IoError: return 500;
    default: return 422;
  }
}

// ---------------------------------------------------------------- api

Api::Api(Config config, std::chrono::minutes session_ttl) : config_(std::move(config)), ttl_(session_ttl) {
  config_.validate();
  engine_ = std::make_unique<Engine>(config_.grammar_dir, config_.languages);
  cas_ = std::make_unique<ConcreteGrammar>(load_concrete_file(config_.grammar_dir / "cas.gfc", engine_->abstract_ptr()));
  evaluator_ = std::make_unique<Evaluator>(*cas_);
  lexicon_ = std::make_unique<Lexicon>(Lexicon::load(config_.lexicon_path()));
}

Api::~Api() = default;

json Api::languages() const { return json(engine_->languages()); }

json Api::parse(const json& req) const {
  std::string lang = string_field(req, "language", config_.default_from);
  auto [cat, trees] = engine_->parse_any(string_field(req, "text"), lang, string_field(req, "category", ""));
  json ts = json::array();
  for (const auto& t : trees) ts.push_back(tree_to_json(t));
  return json{{"category", cat}, {"trees", ts}};
}

json Api::linearize(const json& req) const {
  Tree t = tree_from_json(field(req, "tree"), engine_->abstract());
  Category cat = typecheck(t, engine_->abstract());
  std::string style = string_field(req, "style", "");
  Style s = style.empty() ? default_style(cat) : style == "operator" ? Style::Operator : Style::Descriptive;
  if (!style.empty() && style != "operator" && style != "descriptive")
    throw Error(Errc::SyntaxError, "style must be descriptive or operator", {{"field", "style"}});
  auto langs = engine_->expand_targets(req.contains("languages") ? language_list(req.at("languages"))
                                                                   : std::vector<std::string>{"all"});
  json out = json::object();
  for (const auto& l : langs) out[l] = engine_->linearize(t, l, s);
  return json{{"category", cat}, {"renderings", out}};
}

json Api::translate(const json& req) const {
  std::vector<std::string> to = req.contains("to") ? language_list(req.at("to")) : std::vector<std::string>{"all"};
  Translation tr = engine_->translate(string_field(req, "text"), string_field(req, "from", config_.default_from), to,
                                      string_field(req, "category", ""));
  return json{{"category", tr.category},
              {"tree", tree_to_json(tr.tree)},
              {"treeText", tr.tree.to_string()},
              {"readings", tr.readings},
              {"renderings", renderings(tr)}};
}

json Api::complete(const json& req) const {
  const json& toks = field(req, "tokens");
  if (!toks.is_array()) throw bad_request("tokens must be a list");
  std::vector<std::string> tokens;
  for (const auto& t : toks) {
    if (!t.is_string()) throw bad_request("tokens must be strings");
    tokens.push_back(t.get<std::string>());
  }
  CompletionSet cs = engine_->complete(tokens, string_field(req, "language", config_.default_from),
                                       string_field(req, "category", "Prop"));
  return json{{"nextTokens", json(std::vector<std::string>(cs.next_tokens.begin(), cs.next_tokens.end()))},
              {"complete", cs.complete}};
}

std::unique_ptr<Session> Api::new_session() const {
  std::shared_ptr<Backend> backend;
  if (config_.backend != "builtin")
    backend = std::make_shared<ExternalBackend>(config_.backend_host(), config_.backend_port());
  return std::make_unique<Session>(*evaluator_, std::move(backend));
}

std::string Api::issue_token() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream os;
  os << std::hex << rng() << rng();
  return os.str();
}

std::size_t Api::session_count() const {
  std::lock_guard g(sessions_lock_);
  return sessions_.size();
}

json Api::command(const json& req) {
  std::string lang = string_field(req, "language", config_.default_from);
  std::string token = string_field(req, "session", "");
  auto now = std::chrono::steady_clock::now();
  std::shared_ptr<SessionSlot> slot;
  {
    std::lock_guard g(sessions_lock_);
    std::erase_if(sessions_, [&](const auto& kv) {
      std::unique_lock l(kv.second->lock, std::try_to_lock);
      return l.owns_lock() && now - kv.second->last_used > ttl_;
    });
    if (!token.empty()) {
      auto it = sessions_.find(token);
      if (it == sessions_.end())
        throw Error(Errc::SyntaxError, "unknown or expired session " + token, {{"session", token}});
      slot = it->second;
    } else {
      token = issue_token();
      slot = std::make_shared<SessionSlot>();
      slot->session = new_session();
      slot->last_used = now;
      sessions_[token] = slot;
    }
  }
  std::lock_guard g(slot->lock);
  slot->last_used = std::chrono::steady_clock::now();
  Tree cmd = engine_->parse(string_field(req, "text"), lang, "Command").front();
  CommandResult r = slot->session->eval(cmd);
  bool ret = r.block.kind == CellBlock::Kind::Return;
  return json{{"session", token},
              {"cell", r.block.cell},
              {"block", ret ? "ReturnBlock" : "EmptyBlock"},
              {"raw", ret ? json(r.block.output) : json(nullptr)},
              {"answerText", engine_->linearize(r.answer, lang)},
              {"answerTree", tree_to_json(r.answer)},
              {"waited", r.waited}};
}

json Api::wordproblem(const json& req) const {
  bool allow_zero = req.is_object() && req.contains("allowZero") && req.at("allowZero").is_boolean() &&
                    req.at("allowZero").get<bool>();
  std::string lang = string_field(req, "language", config_.default_from);
  WordProblemResult r = solve_word_problem(string_field(req, "text"), *lexicon_, allow_zero);
  json constraints = json::array(), equations = json::array(), solutions = json::array();
  for (const auto& c : r.constraints.constraints) constraints.push_back(c.to_string());
  for (std::size_t i = 0; i < r.system.equations.size(); ++i) equations.push_back(r.system.equation_text(i));
  for (const auto& s : r.solutions) {
    json one = json::object();
    for (const auto& [name, value] : s) one[name] = value;
    solutions.push_back(one);
  }
  return json{{"statements", json(r.statements)},
              {"constraints", constraints},
              {"equations", equations},
              {"solutions", solutions},
              {"answerText", r.solutions.empty() ? json(nullptr) : json(render_answer(r.solutions, lang, *engine_))}};
}

Api::Response Api::handle(const std::string& method, const std::string& path, const std::string& body) {
  try {
    if (method == "GET" && path == "/languages") return {200, languages().dump()};
    if (method != "POST") return {404, json{{"error", "NotFound"}, {"message", method + " " + path}}.dump()};
    json req = body.empty() ? json::object() : json::parse(body);
    json out;
    if (path == "/parse") out = parse(req);
    else if (path == "/linearize") out = linearize(req);
    else if (path == "/translate") out = translate(req);
    else if (path == "/complete") out = complete(req);
    else if (path == "/command") out = command(req);
    else if (path == "/wordproblem") out = wordproblem(req);
    else return {404, json{{"error", "NotFound"}, {"message", method + " " + path}}.dump()};
    return {200, out.dump()};
  } catch (const Error& e) {
    return {http_status(e.code()), error_to_json(e).dump()};
  } catch (const json::exception& e) {
    return {400, json{{"error", "BadRequest"}, {"message", e.what()}}.dump()};
  }
}

// ---------------------------------------------------------------- http

struct HttpServer::Impl {
  explicit Impl(Api& a) : api(a) {}
  Api& api;
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(Api& api) : impl_(std::make_unique<Impl>(api)) {
  auto adapt = [this](const httplib::Request& req, httplib::Response& res) {
    Api::Response r = impl_->api.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
    res.set_header("Access-Control-Allow-Origin", "*");
  };
  impl_->server.Get("/languages", adapt);
  for (const char* p : {"/parse", "/linearize", "/translate", "/complete", "/command", "/wordproblem"})
    impl_->server.Post(p, adapt);
  impl_->server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Allow-Methods", "GET, POST");
    res.status = 204;
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0)
    throw Error(Errc::ConfigError, "cannot listen on " + host + ":" + std::to_string(port),
                {{"key", "listenAddress"}, {"value", host + ":" + std::to_string(port)}});
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void HttpServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

// ---------------------------------------------------------------- repl

void run_repl(const Engine& engine, Session& session, const std::string& lang, std::istream& in, std::ostream& out,
              bool echo) {
  std::string line;
  while (true) {
    out << "sage> " << std::flush;
    if (!std::getline(in, line)) {
      out << "\n";
      return;
    }
    line = trim(line);
    if (echo) out << line << "\n";
    if (line.empty()) continue;
    try {
      Tree cmd = engine.parse(line, lang, "Command").front();
      CommandResult r = session.eval(cmd, [&] { out << "waiting..." << std::endl; });
      if (r.block.kind == CellBlock::Kind::Return) out << "[" << r.block.cell << "] " << r.block.output << "\n";
      out << "answer: " << engine.linearize(r.answer, lang) << "\n";
    } catch (const Error& e) {
      out << "error: " << e.what();
      if (!e.get("expected").empty()) out << "; expected: " << e.get("expected");
      out << "\n";
    }
  }
}

}  // namespace mgl
