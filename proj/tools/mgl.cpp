// mgl: translate, complete, solve word problems, run the REPL or the HTTP service.

#include <unistd.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mgl/service.hpp"

using namespace mgl;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read " + path, {{"path", path}});
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilingual mathematical grammar tools"};
  app.require_subcommand(1);
  std::string config_path, grammar_dir;
  app.add_option("--config", config_path, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--grammar-dir", grammar_dir, "directory with the grammar and lexicon files");

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  std::string listen;
  serve->add_option("--listen", listen, "host:port, overrides listenAddress");

  auto* translate = app.add_subcommand("translate", "translate a sentence");
  std::string from, to = "all", category, text;
  translate->add_option("--from", from, "source language");
  translate->add_option("--to", to, "target language, comma list or all");
  translate->add_option("--category", category, "sentence category (default: first that parses)");
  translate->add_option("text", text, "sentence")->required();

  auto* complete = app.add_subcommand("complete", "list the tokens that can follow a prefix");
  std::string lang, prefix;
  std::string complete_cat = "Prop";
  complete->add_option("--lang", lang, "language");
  complete->add_option("--category", complete_cat, "sentence category");
  complete->add_option("prefix", prefix, "sentence prefix");

  auto* repl = app.add_subcommand("repl", "computer algebra session in natural language");
  repl->add_option("--lang", lang, "language");

  auto* solve = app.add_subcommand("solve", "solve a word problem file");
  std::string problem;
  bool no_min = false, trace = false;
  solve->add_option("file", problem, "problem text file")->required();
  solve->add_option("--lang", lang, "answer language");
  solve->add_flag("--no-min", no_min, "allow zero members in each named population");
  solve->add_flag("--trace", trace, "print statements, constraints and equations");

  CLI11_PARSE(app, argc, argv);

  try {
    Config config;
    if (!config_path.empty()) config = load_config(config_path);
    if (!grammar_dir.empty()) config.grammar_dir = grammar_dir;
    if (config.grammar_dir.empty()) config.grammar_dir = MGL_DEFAULT_DATA_DIR;
    if (!listen.empty()) config.listen_address = listen;
    if (lang.empty()) lang = config.default_from;
    if (from.empty()) from = config.default_from;

    Api api(config);
    const Engine& engine = api.engine();

    if (*serve) {
      HttpServer server(api);
      int port = server.start(config.listen_host(), config.listen_port());
      std::cerr << "listening on " << config.listen_host() << ":" << port << std::endl;
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.wait();
      return 0;
    }

    if (*translate) {
      std::vector<std::string> targets;
      std::stringstream ss(to);
      for (std::string t; std::getline(ss, t, ',');) targets.push_back(t);
      Translation tr = engine.translate(text, from, targets, category);
      for (const auto& [l, s] : tr.renderings) std::cout << l << ": " << s << "\n";
      return 0;
    }

    if (*complete) {
      auto tokens = prefix.empty() ? std::vector<std::string>{} : engine.tokenize(prefix, lang);
      CompletionSet cs = engine.complete(tokens, lang, complete_cat);
      for (const auto& t : cs.next_tokens) std::cout << t << "\n";
      if (cs.complete) std::cout << "(complete)\n";
      return 0;
    }

    if (*repl) {
      auto session = api.new_session();
      run_repl(engine, *session, lang, std::cin, std::cout, !isatty(STDIN_FILENO));
      return 0;
    }

    if (*solve) {
      WordProblemResult r = solve_word_problem(read_file(problem), api.lexicon(), no_min);
      if (trace) {
        std::cout << "statements:\n";
        for (const auto& s : r.statements) std::cout << "  " << s << "\n";
        std::cout << "constraints:\n";
        for (const auto& c : r.constraints.constraints) std::cout << "  " << c.to_string() << "\n";
        std::cout << "equations:\n";
        for (std::size_t i = 0; i < r.system.equations.size(); ++i)
          std::cout << "  " << r.system.equation_text(i) << "\n";
      }
      if (r.solutions.empty()) {
        std::cout << "no solution\n";
        return 1;
      }
      std::cout << render_answer(r.solutions, lang, engine) << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << "\n";
    if (!e.get("expected").empty()) std::cerr << "expected: " << e.get("expected") << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
