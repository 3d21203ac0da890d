#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <future>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "doctest.h"
#include "mgl/service.hpp"
#include "support.hpp"

using namespace mgl;
using test::error_of;

namespace {

Config test_config() {
  Config c;
  c.grammar_dir = test::data_dir();
  return c;
}

Api& api() {
  static Api a(test_config());
  return a;
}

json post(Api& a, const std::string& path, const json& body, int expect = 200) {
  Api::Response r = a.handle("POST", path, body.dump());
  CHECK(r.status == expect);
  return json::parse(r.body);
}

std::string latex_normal(const std::string& s) {
  std::string t;
  for (char c : s)
    if (c != ' ') t += c;
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == '{' && i + 2 < t.size() && t[i + 2] == '}') {
      out += t[i + 1];
      i += 2;
    } else {
      out += t[i];
    }
  }
  return out;
}

struct Run {
  int status;
  std::string out;
};

Run run_cli(const std::string& args) {
  std::string cmd = std::string(MGL_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

const std::string kMathbar = "Gamma is greater than pi raised to x";

}  // namespace

TEST_CASE("config files") {
  std::istringstream in(
      "# comment\n"
      "grammarDir = grammars\n"
      "languages = eng, spa\n"
      "defaultFrom = spa\n"
      "backend = external:localhost:4000\n"
      "listenAddress = 0.0.0.0:9000\n");
  Config c = parse_config(in, "/etc/mgl");
  CHECK(c.grammar_dir == "/etc/mgl/grammars");
  CHECK(c.languages == std::vector<std::string>{"eng", "spa"});
  CHECK(c.default_from == "spa");
  CHECK(c.backend_host() == "localhost");
  CHECK(c.backend_port() == "4000");
  CHECK(c.listen_host() == "0.0.0.0");
  CHECK(c.listen_port() == 9000);
  CHECK(c.lexicon_path() == "/etc/mgl/grammars/lexicon.txt");
  CHECK_NOTHROW(c.validate());

  Config shipped = load_config(test::data_dir() / "mgl.conf");
  CHECK(shipped.grammar_dir == test::data_dir() / ".");
  CHECK(shipped.languages == kShippedLanguages);
  CHECK_NOTHROW(shipped.validate());

  auto bad = [](const std::string& text) {
    return error_of([&] {
      std::istringstream s(text);
      Config c = parse_config(s, "/x");
      c.validate();
    });
  };
  CHECK(bad("colour = red\n") == Errc::ConfigError);
  CHECK(bad("grammarDir\n") == Errc::ConfigError);
  CHECK(bad("grammarDir = g\nlanguages = eng, klingon\n") == Errc::ConfigError);
  CHECK(bad("grammarDir = g\nlanguages = eng\ndefaultFrom = spa\n") == Errc::ConfigError);
  CHECK(bad("grammarDir = g\nbackend = sage\n") == Errc::ConfigError);
  CHECK(bad("grammarDir = g\nlistenAddress = localhost\n") == Errc::ConfigError);
  CHECK(bad("grammarDir = g\nlistenAddress = localhost:99999\n") == Errc::ConfigError);
  CHECK(bad("languages = eng\n") == Errc::ConfigError);
  CHECK(error_of([] { load_config("/nonexistent/mgl.conf"); }) == Errc::IoError);

  Config missing = test_config();
  missing.grammar_dir = "/nonexistent";
  CHECK(error_of([&] { Api a(missing); }) == Errc::IoError);
}

TEST_CASE("tree json") {
  const AbstractGrammar& g = api().engine().abstract();
  Tree t = test::tree("DoSelectFromN y (domain (inverse tanh)) (mkProp (gt_num (At cosh (Var2Num y)) (IntLit 12)))");
  json j = tree_to_json(t);
  CHECK(j["ctor"] == "DoSelectFromN");
  CHECK(j["children"][0] == json{{"var", "y"}});
  CHECK(j["children"][2]["children"][0]["children"][1]["children"][0] == json{{"int", 12}});
  CHECK(tree_from_json(j, g) == t);
  CHECK(tree_from_json(json{{"var", "x"}}, g) == Tree::variable("x", "VarNum"));
  CHECK(tree_from_json(json{{"int", "123456789012345678901234567890"}}, g) ==
        Tree::integer("123456789012345678901234567890"));

  LeafPool pool = LeafPool::numeric({"x", "y"}, {0, 1, 2});
  for (const auto& cat : {"Prop", "Exercise", "Command", "Answer"})
    for (const auto& tr : enumerate_trees(g, cat, 3, pool)) CHECK(tree_from_json(tree_to_json(tr), g) == tr);

  CHECK(error_of([&] { tree_from_json(json{{"ctor", "nope"}}, g); }) == Errc::UnknownConstructor);
  CHECK(error_of([&] { tree_from_json(json{{"ctor", "plus"}, {"children", json::array()}}, g); }) ==
        Errc::ArityError);
  CHECK(error_of([&] { tree_from_json(json::array(), g); }) == Errc::SyntaxError);
  CHECK(error_of([&] { tree_from_json(json{{"int", -3}}, g); }) == Errc::InvalidLeaf);
}

TEST_CASE("languages and translate") {
  Api::Response r = api().handle("GET", "/languages", "");
  CHECK(r.status == 200);
  CHECK(json::parse(r.body) == json{"eng", "spa", "fre", "latex", "cas"});

  json out = post(api(), "/translate", {{"text", kMathbar}, {"from", "eng"}, {"to", "ALL"}});
  CHECK(out["category"] == "Prop");
  CHECK(out["treeText"] == "mkProp (gt_num gammaConst (power pi (Var2Num x)))");
  CHECK(out["renderings"].size() == 5);
  CHECK(out["renderings"]["spa"] == "Gamma es mayor que pi elevado a x");
  CHECK(out["renderings"]["fre"] == "Gamma est supérieur à pi élevé à x");
  CHECK(latex_normal(out["renderings"]["latex"]) == "\\gamma>\\pi^x");
  CHECK(out["renderings"]["cas"] == "euler_gamma > pi^x");

  // thin adapter: the body is the serialized engine result
  Translation tr = api().engine().translate(kMathbar, "eng", {"all"}, "");
  json expect = {{"category", tr.category},
                 {"tree", tree_to_json(tr.tree)},
                 {"treeText", tr.tree.to_string()},
                 {"readings", tr.readings},
                 {"renderings", json::object()}};
  for (const auto& [l, s] : tr.renderings) expect["renderings"][l] = s;
  CHECK(api().handle("POST", "/translate", json{{"text", kMathbar}, {"from", "eng"}, {"to", "all"}}.dump()).body ==
        expect.dump());

  out = post(api(), "/translate", {{"text", "calcula la suma de 4 y de 5."}, {"from", "spa"}, {"to", {"eng", "cas"}}});
  CHECK(out["category"] == "Exercise");
  CHECK(out["renderings"] == json{{"eng", "Compute the sum of 4 and 5."}, {"cas", "4 + 5"}});

  out = post(api(), "/translate", {{"text", "hello"}, {"from", "eng"}}, 422);
  CHECK(out["error"] == "UnknownToken");
  out = post(api(), "/translate", {{"text", kMathbar}, {"from", "deu"}}, 404);
  CHECK(out["error"] == "UnknownLanguage");
  out = post(api(), "/translate", {{"text", "Gamma is greater than"}, {"from", "eng"}}, 422);
  CHECK(out["error"] == "NoParse");
  CHECK(out["info"]["position"] == "4");
}

TEST_CASE("parse and linearize") {
  json out = post(api(), "/parse", {{"language", "eng"}, {"text", kMathbar}, {"category", "Prop"}});
  REQUIRE(out["trees"].size() == 1);
  json tree = out["trees"][0];
  out = post(api(), "/linearize", {{"tree", tree}, {"languages", {"spa", "latex"}}});
  CHECK(out["category"] == "Prop");
  CHECK(out["renderings"]["spa"] == "Gamma es mayor que pi elevado a x");
  CHECK(out["renderings"].size() == 2);

  json sum = tree_to_json(test::tree("plus (BaseValNum (Var2Num x) (Var2Num y))"));
  CHECK(post(api(), "/linearize", {{"tree", sum}, {"languages", "eng"}, {"style", "operator"}})["renderings"]["eng"] ==
        "x plus y");
  CHECK(post(api(), "/linearize", {{"tree", sum}, {"languages", "eng"}})["renderings"]["eng"] == "the sum of x and y");
  CHECK(post(api(), "/linearize", {{"tree", sum}, {"style", "fancy"}}, 422)["error"] == "SyntaxError");
  CHECK(post(api(), "/parse", {{"language", "eng"}}, 422)["error"] == "SyntaxError");

  CHECK(api().handle("POST", "/parse", "{not json").status == 400);
  CHECK(api().handle("POST", "/nowhere", "{}").status == 404);
  CHECK(api().handle("GET", "/parse", "").status == 404);
}

TEST_CASE("complete") {
  json out = post(api(), "/complete", {{"language", "eng"}, {"tokens", json::array()}, {"category", "Prop"}});
  CHECK(out["complete"] == false);
  std::vector<std::string> words = {"Gamma", "is", "greater", "than", "pi", "raised", "to", "x"};
  std::vector<std::string> prefix;
  for (const auto& w : words) {
    out = post(api(), "/complete", {{"language", "eng"}, {"tokens", prefix}, {"category", "Prop"}});
    bool offered = false;
    for (const auto& t : out["nextTokens"]) offered |= t == w || (w == "x" && t == kVariableClass);
    CHECK(offered);
    prefix.push_back(w);
  }
  out = post(api(), "/complete", {{"language", "eng"}, {"tokens", prefix}, {"category", "Prop"}});
  CHECK(out["complete"] == true);

  out = post(api(), "/complete", {{"language", "eng"}, {"tokens", {"Gamma", "wibble"}}, {"category", "Prop"}}, 422);
  CHECK(out["error"] == "UnknownToken");
  CHECK(out["info"]["token"] == "wibble");
  CHECK(out["info"]["position"] == "1");
}

TEST_CASE("concurrent completion matches serial completion") {
  const Engine& e = api().engine();
  std::vector<std::vector<std::string>> prefixes;
  LeafPool pool = LeafPool::numeric({"x"}, {1});
  for (const auto& t : enumerate_trees(e.abstract(), "Command", 3, pool)) {
    auto toks = e.tokenize(e.linearize(t, "eng"), "eng");
    for (std::size_t n = 0; n <= toks.size(); n += 2) prefixes.emplace_back(toks.begin(), toks.begin() + n);
  }
  std::vector<std::string> serial;
  for (const auto& p : prefixes)
    serial.push_back(api().handle("POST", "/complete", json{{"tokens", p}, {"category", "Command"}}.dump()).body);

  std::vector<std::future<std::vector<std::string>>> workers;
  for (int w = 0; w < 6; ++w)
    workers.push_back(std::async(std::launch::async, [&] {
      std::vector<std::string> got;
      for (const auto& p : prefixes)
        got.push_back(api().handle("POST", "/complete", json{{"tokens", p}, {"category", "Command"}}.dump()).body);
      return got;
    }));
  for (auto& w : workers) CHECK(w.get() == serial);
}

TEST_CASE("command sessions reproduce the transcript") {
  Api a(test_config());
  struct Step {
    const char* text;
    const char* raw;
    const char* answer;
  };
  const Step steps[] = {
      {"compute the sum of 1, 2, 3, 4 and 5.", "15", "it is 15"},
      {"compute the summation of x when x ranges from 1 to 100.", "5050", "it is 5050"},
      {"compute the integral of the cosine on the open interval from 0 to the quotient of pi and 2.", "1", "it is 1"},
      {"compute the integral of the function mapping x to the square root of x on the closed interval from 1 to 2.",
       "4/3*sqrt(2) - 2/3", "it is 4/3*sqrt(2) - 2/3"},
      {"compute the sum of x and y.", "x + y", "it is x plus y"},
      {"compute the sum of x and 5.", "x + 5", "it is x plus 5"},
      {"compute the sum of 4 and 5.", "9", "it is 9"},
  };
  std::string session;
  int cell = 1;
  for (const auto& s : steps) {
    json req = {{"language", "eng"}, {"text", s.text}};
    if (!session.empty()) req["session"] = session;
    json out = post(a, "/command", req);
    if (session.empty()) session = out["session"];
    CHECK(out["session"] == session);
    CHECK(out["cell"] == cell++);
    CHECK(out["block"] == "ReturnBlock");
    CHECK(out["raw"] == s.raw);
    CHECK(out["answerText"] == s.answer);
    CHECK(out["answerTree"]["ctor"] == "SimpleNum");
  }
  json out = post(a, "/command", {{"session", session}, {"text", "assume that x is greater than 2"}});
  CHECK(out["block"] == "EmptyBlock");
  CHECK(out["raw"].is_null());
  CHECK(out["answerText"] == "I assume that x is greater than 2");
  out = post(a, "/command", {{"session", session}, {"text", "assign 2 to x"}});
  CHECK(out["answerText"] == "2 is now assigned to x");
  out = post(a, "/command", {{"session", session}, {"text", "compute the sum of x and y."}});
  CHECK(out["raw"] == "y + 2");

  // a fresh session starts at cell 1 and knows nothing about x
  json other = post(a, "/command", {{"text", "compute the sum of x and 1."}});
  CHECK(other["session"] != session);
  CHECK(other["cell"] == 1);
  CHECK(other["raw"] == "x + 1");
  CHECK(a.session_count() == 2);

  CHECK(post(a, "/command", {{"session", "nope"}, {"text", "compute 1."}}, 422)["error"] == "SyntaxError");
  out = post(a, "/command", {{"session", session}, {"text", "compute the quotient of 1 and 0."}}, 422);
  CHECK(out["error"] == "DivisionByZero");
  CHECK(post(a, "/command", {{"session", session}, {"text", "compute 1."}})["cell"] == 11);
}

TEST_CASE("idle sessions expire") {
  Api a(test_config(), std::chrono::minutes(0));
  json first = post(a, "/command", {{"text", "compute the sum of 4 and 5."}});
  std::this_thread::sleep_for(std::chrono::milliseconds(5));
  json out = post(a, "/command", {{"session", first["session"]}, {"text", "compute 1."}}, 422);
  CHECK(out["info"]["session"] == first["session"]);
}

TEST_CASE("word problem endpoint") {
  json out = post(api(), "/wordproblem",
                  {{"text",
                    "A farm has ducks and rabbits. There are 100 animals and they have 260 legs. How many ducks and "
                    "rabbits are there?"}});
  CHECK(out["solutions"] == json::array({json{{"d", 70}, {"r", 30}}}));
  CHECK(out["answerText"] == "d is equal to 70, r is equal to 30");
  CHECK(out["equations"] == json{"d + r = 100", "2*d + 4*r = 260"});
  CHECK(out["constraints"].size() == 7);

  std::string tight =
      "A farm has ducks and rabbits. There are 100 animals and they have 200 legs. How many ducks and rabbits are "
      "there?";
  out = post(api(), "/wordproblem", {{"text", tight}});
  CHECK(out["solutions"].empty());
  CHECK(out["answerText"].is_null());
  out = post(api(), "/wordproblem", {{"text", tight}, {"allowZero", true}, {"language", "spa"}});
  CHECK(out["solutions"] == json::array({json{{"d", 100}, {"r", 0}}}));
  CHECK(out["answerText"] == "d es igual a 100, r es igual a 0");

  CHECK(post(api(), "/wordproblem", {{"text", "Frogs sing."}}, 422)["error"] == "UnmatchedSentence");
}

TEST_CASE("http transport") {
  Api a(test_config());
  HttpServer server(a);
  int port = server.start("127.0.0.1", 0);
  httplib::Client client("127.0.0.1", port);

  auto res = client.Get("/languages");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == a.handle("GET", "/languages", "").body);

  std::string body = json{{"text", kMathbar}, {"from", "eng"}, {"to", "all"}}.dump();
  res = client.Post("/translate", body, "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == a.handle("POST", "/translate", body).body);

  res = client.Post("/complete", json{{"tokens", {"hello"}}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 422);
  CHECK(json::parse(res->body)["error"] == "UnknownToken");

  res = client.Post("/command", json{{"text", "compute the sum of 4 and 5."}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(json::parse(res->body)["answerText"] == "it is 9");
  server.stop();

  HttpServer nowhere(a);
  CHECK(error_of([&] { nowhere.start("256.0.0.1", 0); }) == Errc::ConfigError);
}

TEST_CASE("repl") {
  auto session = api().new_session();
  std::istringstream in(
      "compute the sum of 1, 2, 3, 4 and 5.\n"
      "\n"
      "compute the sum of x and y.\n"
      "compute the sum of\n"
      "assume that x is greater than 2\n"
      "compute the sum of 4 and 5.\n");
  std::ostringstream out;
  run_repl(api().engine(), *session, "eng", in, out, true);
  CHECK(out.str() ==
        "sage> compute the sum of 1, 2, 3, 4 and 5.\n"
        "[1] 15\n"
        "answer: it is 15\n"
        "sage> \n"
        "sage> compute the sum of x and y.\n"
        "[2] x + y\n"
        "answer: it is x plus y\n"
        "sage> compute the sum of\n"
        "error: no parse at position 4; expected: Gamma INTEGER VARIDENT pi the\n"
        "sage> assume that x is greater than 2\n"
        "answer: I assume that x is greater than 2\n"
        "sage> compute the sum of 4 and 5.\n"
        "[4] 9\n"
        "answer: it is 9\n"
        "sage> \n");
}

TEST_CASE("command line") {
  std::string data = "--grammar-dir " + test::data_dir().string() + " ";
  Run r = run_cli(data + "translate --from eng --to all \"" + kMathbar + "\"");
  CHECK(r.status == 0);
  CHECK(r.out ==
        "eng: Gamma is greater than pi raised to x\n"
        "spa: Gamma es mayor que pi elevado a x\n"
        "fre: Gamma est supérieur à pi élevé à x\n"
        "latex: \\gamma > \\pi^{x}\n"
        "cas: euler_gamma > pi^x\n");

  r = run_cli(data + "translate --from eng --to spa hello");
  CHECK(r.status == 2);
  CHECK(r.out.find("UnknownToken") != std::string::npos);

  r = run_cli(data + "solve " + (test::data_dir() / "farm.txt").string());
  CHECK(r.status == 0);
  CHECK(r.out == "d is equal to 70, r is equal to 30\n");
  r = run_cli(data + "solve --trace " + (test::data_dir() / "farm.txt").string());
  CHECK(r.out.find("  2*d + 4*r = 260\n") != std::string::npos);
  r = run_cli(data + "solve " + (test::data_dir() / "farm-200.txt").string());
  CHECK(r.status == 1);
  CHECK(r.out == "no solution\n");
  r = run_cli(data + "solve --no-min --lang fre " + (test::data_dir() / "farm-200.txt").string());
  CHECK(r.status == 0);
  CHECK(r.out.find("100") != std::string::npos);

  r = run_cli(data + "complete --category Prop \"Gamma is greater than pi raised to\"");
  CHECK(r.out == "Gamma\nINTEGER\nVARIDENT\npi\nthe\n");
  r = run_cli(data + "complete --category Prop \"Gamma is greater than pi raised to x\"");
  CHECK(r.out.find("(complete)") != std::string::npos);

  r = run_cli("--config " + (test::data_dir() / "mgl.conf").string() +
              " repl < /dev/null");
  CHECK(r.status == 0);
  r = run_cli(data + "translate --from deu x");
  CHECK(r.status == 2);
}
