#include <boost/asio.hpp>
#include <json.hpp>
#include <thread>

#include "doctest.h"
#include "mgl/engine.hpp"
#include "mgl/error.hpp"
#include "mgl/session.hpp"
#include "oracles/cas_oracle.hpp"
#include "support.hpp"

using namespace mgl;
using test::error_of;

namespace {

const Engine& engine() {
  static Engine e(test::data_dir());
  return e;
}

const Evaluator& evaluator() {
  static Evaluator ev(engine().concrete("cas"));
  return ev;
}

Tree cas(const std::string& code, const Category& cat = "ValNum") { return evaluator().parse_cas(code, cat); }

std::string simp(const std::string& code, const Bindings& b = {}) { return render_cas(evaluator().simplify(cas(code), b)); }

Tree command(const std::string& english) { return engine().parse(english, "eng", "Command").front(); }

std::string strip_period(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace

TEST_CASE("render_cas") {
  ExactExpr v = ExactExpr(Term{Rational(4, 3), 2, {}}) - ExactExpr(Rational(2, 3));
  CHECK(render_cas(v) == "4/3*sqrt(2) - 2/3");
  CHECK(render_cas(ExactExpr(15)) == "15");
  CHECK(render_cas(ExactExpr()) == "0");
  CHECK(render_cas(ExactExpr::pi() * ExactExpr(Rational(1, 2))) == "1/2*pi");
  CHECK(simp("x + y") == "x + y");
  CHECK(simp("5 + x") == "x + 5");
  CHECK(simp("y*x + x^2 - 3") == "x^2 + x*y - 3");
  CHECK(simp("0 - 2/3") == "-2/3");
  CHECK(simp("sqrt(8)") == "2*sqrt(2)");
  CHECK(simp("1/(sqrt(2) + 1)") == "1/(sqrt(2) + 1)");
  CHECK(simp("pi/2") == "1/2*pi");
}

TEST_CASE("simplify") {
  CHECK(simp("4 + 5") == "9");
  CHECK(simp("sqrt(2)*sqrt(6)") == "2*sqrt(3)");
  CHECK(simp("(1 + sqrt(2))^2") == "2*sqrt(2) + 3");
  CHECK(simp("1/sqrt(2)") == "1/2*sqrt(2)");
  CHECK(simp("abs(0 - 7/2)") == "7/2");
  CHECK(simp("cos(pi/3)") == "1/2");
  CHECK(simp("sin(pi/4)") == "1/2*sqrt(2)");
  CHECK(simp("4^(3/2)") == "8");
  CHECK(simp("x/x") == "1");
  CHECK(simp("x + y", {{"x", ExactExpr(2)}}) == "y + 2");
  CHECK(simp("(x |--> x^2)(3)") == "9");
  CHECK(error_of([] { simp("1/(2 - 2)"); }) == Errc::DivisionByZero);
  CHECK(error_of([] { simp("0^(0 - 1)"); }) == Errc::DivisionByZero);
}

TEST_CASE("ground trees to depth 3 agree with rational and numeric evaluation") {
  oracle::RationalEvaluator ro;
  oracle::GroundChecker checker(evaluator(), 1);
  oracle::GroundReport r;
  auto trees = enumerate_trees(engine().abstract(), "ValNum", 3, LeafPool::numeric({}, {0, 1, 2}));
  for (const auto& t : trees) {
    if (oracle::mentions(t, "integralOver")) continue;
    oracle::RatValue want = ro.eval(t);
    checker.check(t, want, r);
    if (want.kind != oracle::RatValue::Kind::Undefined) checker.check_numeric(t, r);
  }
  for (const auto& f : r.failures) MESSAGE(f);
  CHECK(r.ok());
  CHECK(r.exact == 45);
  CHECK(r.div_zero == 33);
}

TEST_CASE("parse-back of render_cas is the identity") {
  std::vector<ExactExpr> samples = {
      ExactExpr(Term{Rational(4, 3), 2, {}}) - ExactExpr(Rational(2, 3)),
      ExactExpr(Rational(-7, 5)),
      ExactExpr::pi() * ExactExpr(Term{Rational(-1, 3), 5, {}}) + ExactExpr(1),
      ExactExpr(Term{Rational(9, 4), 30, {}}) - ExactExpr(Term{1, 3, {}}),
  };
  for (const auto& e : samples) {
    CAPTURE(render_cas(e));
    CHECK(evaluator().simplify(cas(render_cas(e))) == e);
    CHECK(evaluator().simplify(evaluator().to_tree(e)) == e);
  }
}

TEST_CASE("sum_range") {
  const Evaluator& ev = evaluator();
  Tree x = cas("x");
  CHECK(render_cas(ev.sum_range(x, "x", 1, 100)) == "5050");
  CHECK(render_cas(ev.sum_range(x, "x", 5, 5)) == "5");
  CHECK(render_cas(ev.sum_range(x, "x", 5, 4)) == "0");
  CHECK(render_cas(ev.sum_range(cas("x^2"), "x", 1, 10)) == "385");
  CHECK(render_cas(ev.sum_range(cas("x*y"), "x", 1, 3, {{"y", ExactExpr(2)}})) == "12");
  CHECK(error_of([&] { ev.sum_range(x, "x", ExactExpr::atom(Atom::variable("n")), 3); }) == Errc::NonGroundBound);
  CHECK(error_of([&] { ev.sum_range(x, "x", ExactExpr(Rational(1, 2)), 3); }) == Errc::NonGroundBound);
  CHECK(error_of([&] { ev.sum_range(cas("x + y"), "x", 1, 3); }) == Errc::UnboundBodyVariable);
}

TEST_CASE("sum_range matches a loop on random polynomial bodies") {
  auto r = oracle::check_sum_range_random(evaluator(), 200, 20240611);
  for (const auto& f : r.failures) MESSAGE(f);
  CHECK(r.cases == 200);
  CHECK(r.ok());
}

TEST_CASE("integrate_definite") {
  const Evaluator& ev = evaluator();
  auto integral = [&](const std::string& f, const std::string& set) {
    return render_cas(ev.integrate_definite(cas(f, "ValFun"), cas(set, "ValSet")));
  };
  CHECK(integral("cos", "open_interval(0, pi/2)") == "1");
  CHECK(integral("x |--> sqrt(x)", "closed_interval(1, 2)") == "4/3*sqrt(2) - 2/3");
  CHECK(integral("x |--> x", "closed_interval(0, 0)") == "0");
  CHECK(integral("x |--> sqrt(x)", "open_interval(1, 2)") == integral("x |--> sqrt(x)", "closed_interval(1, 2)"));
  CHECK(error_of([&] { integral("tanh", "closed_interval(0, 1)"); }) == Errc::UnsupportedIntegrand);
  CHECK(error_of([&] { integral("x |--> 1/x", "closed_interval(1, 2)"); }) == Errc::UnsupportedIntegrand);
  CHECK(error_of([&] { integral("x |--> x", "closed_interval(0, y)"); }) == Errc::UnboundedInterval);
}

TEST_CASE("integrate_definite matches quadrature on a lattice") {
  auto r = oracle::check_integral_lattice(evaluator());
  for (const auto& f : r.failures) MESSAGE(f);
  CHECK(r.cases == 50);
  CHECK(r.ok());
}

TEST_CASE("transcript") {
  Session s(evaluator());
  struct Step {
    std::string command, output, answer;
  };
  std::vector<Step> steps = {
      {"compute the sum of 1, 2, 3, 4 and 5.", "15", "it is 15"},
      {"compute the summation of x when x ranges from 1 to 100.", "5050", "it is 5050"},
      {"compute the integral of the cosine on the open interval from 0 to the quotient of pi and 2.", "1",
       "it is 1"},
      {"compute the integral of the function mapping x to the square root of x on the closed interval from 1 to 2.",
       "4/3*sqrt(2) - 2/3", "it is 4/3*sqrt(2) - 2/3"},
      {"compute the sum of x and y.", "x + y", "it is x plus y"},
      {"compute the sum of x and 5.", "x + 5", "it is x plus 5"},
      {"compute the sum of 4 and 5.", "9", "it is 9"},
  };
  int cell = 1;
  for (const auto& st : steps) {
    CAPTURE(st.command);
    CommandResult r = s.eval(command(st.command));
    CHECK(r.block.kind == CellBlock::Kind::Return);
    CHECK(r.block.cell == cell++);
    CHECK(r.block.output == st.output);
    CHECK(strip_period(engine().linearize(r.answer, "eng")) == st.answer);
  }
}

TEST_CASE("assume and assign") {
  Session s(evaluator());
  CommandResult a = s.eval(command("assume that x is greater than 2"));
  CHECK(a.block.kind == CellBlock::Kind::Empty);
  CHECK(a.block.cell == 1);
  CHECK(strip_period(engine().linearize(a.answer, "eng")) == "I assume that x is greater than 2");
  CHECK(s.assumptions().size() == 1);

  CommandResult b = s.eval(command("assign 2 to x"));
  CHECK(b.block.kind == CellBlock::Kind::Empty);
  CHECK(b.block.cell == 2);
  CHECK(strip_period(engine().linearize(b.answer, "eng")) == "2 is now assigned to x");

  CommandResult c = s.eval(command("compute the sum of x and y."));
  CHECK(c.block.cell == 3);
  CHECK(c.block.output == "y + 2");

  s.set_feedback(true);
  CommandResult d = s.eval(command("compute the sum of 4 and 5."));
  CHECK(d.answer.ctor() == "FeedbackNum");
  CHECK(s.next_cell() == 5);
}

TEST_CASE("failed commands do not consume a cell") {
  Session s(evaluator());
  CHECK(error_of([&] { s.eval(cas("1/0")); }) == Errc::TypeMismatch);
  CHECK(error_of([&] { s.eval(Tree::node("CComputeNum", {cas("1/0")})); }) == Errc::DivisionByZero);
  CHECK(s.next_cell() == 1);
  CHECK(s.eval(Tree::node("CComputeNum", {cas("1/2")})).block.cell == 1);
}

namespace {

// Line-oriented fake CAS: answers "computing" `pending` times per cell, then
// "done" with a fixed output.
class FakeCas {
 public:
  FakeCas(int pending, std::string output) : acceptor_(io_, {boost::asio::ip::tcp::v4(), 0}) {
    port_ = std::to_string(acceptor_.local_endpoint().port());
    thread_ = std::thread([this, pending, output] {
      boost::asio::ip::tcp::iostream s;
      boost::system::error_code ec;
      acceptor_.accept(s.socket(), ec);
      if (ec) return;
      std::string line;
      int left = pending;
      while (std::getline(s, line)) {
        auto req = nlohmann::json::parse(line);
        requests.push_back(req);
        nlohmann::json reply = {{"cell", req["cell"]}};
        if (req.contains("code")) left = pending;
        if (left-- > 0) {
          reply["status"] = "computing";
        } else {
          reply["status"] = "done";
          reply["output"] = output;
        }
        s << reply.dump() << '\n' << std::flush;
      }
    });
  }
  ~FakeCas() {
    // wake a pending accept
    boost::asio::ip::tcp::iostream poke("127.0.0.1", port_);
    poke.close();
    thread_.join();
  }
  const std::string& port() const { return port_; }

  std::vector<nlohmann::json> requests;

 private:
  boost::asio::io_context io_;
  boost::asio::ip::tcp::acceptor acceptor_;
  std::string port_;
  std::thread thread_;
};

}  // namespace

TEST_CASE("external backend") {
  using std::chrono::milliseconds;
  {
    FakeCas fake(2, "4/3*sqrt(2) - 2/3");
    {
      Session s(evaluator(), std::make_shared<ExternalBackend>("127.0.0.1", fake.port(), milliseconds(10)));
      int waits = 0;
      CommandResult r = s.eval(
          command("compute the integral of the function mapping x to the square root of x on the closed interval "
                  "from 1 to 2."),
          [&] { ++waits; });
      CHECK(r.waited);
      CHECK(waits == 1);
      CHECK(r.block.output == "4/3*sqrt(2) - 2/3");
      CHECK(strip_period(engine().linearize(r.answer, "eng")) == "it is 4/3*sqrt(2) - 2/3");
    }
    REQUIRE(fake.requests.size() == 3);
    CHECK(fake.requests[0]["cell"] == 1);
    CHECK(fake.requests[0]["code"] == "integral(x |--> sqrt(x), closed_interval(1, 2))");
    CHECK(fake.requests[1]["poll"] == true);
  }
  {
    FakeCas fake(1000000, "");
    Session s(evaluator(),
              std::make_shared<ExternalBackend>("127.0.0.1", fake.port(), milliseconds(20), milliseconds(200)));
    CHECK(error_of([&] { s.eval(command("compute the sum of 4 and 5.")); }) == Errc::BackendTimeout);
    CHECK(s.next_cell() == 1);
  }
  {
    std::string port;
    {
      FakeCas closed(0, "");
      port = closed.port();
    }
    Session s(evaluator(), std::make_shared<ExternalBackend>("127.0.0.1", port));
    CHECK(error_of([&] { s.eval(command("compute the sum of 4 and 5.")); }) == Errc::BackendError);
  }
}
