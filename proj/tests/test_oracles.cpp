#include "doctest.h"
#include "mgl/parser.hpp"
#include "oracles/completion_oracle.hpp"
#include "oracles/round_trip.hpp"
#include "support.hpp"

using namespace mgl;

namespace {

const LeafPool& pool() {
  static LeafPool p = LeafPool::numeric({"x", "y"}, {0, 1, 2});
  return p;
}

}  // namespace

TEST_CASE("round trip at depth 3") {
  for (std::string lang : {"eng", "spa", "fre"}) {
    const ConcreteGrammar& c = test::concrete(lang + ".gfc");
    for (std::string cat : {"Prop", "Exercise", "Command", "Answer", "ValNum"}) {
      CAPTURE(lang);
      CAPTURE(cat);
      CompiledGrammar cg = compile_cfg(c, default_style(cat));
      auto r = oracle::check_round_trip(c, cg, cat, 3, pool());
      for (const auto& f : r.failures) MESSAGE(f);
      CHECK(r.trees > 0);
      CHECK(r.ok());
    }
  }
}

TEST_CASE("completion oracle at depth 3") {
  for (std::string lang : {"eng", "spa", "fre"}) {
    const ConcreteGrammar& c = test::concrete(lang + ".gfc");
    for (std::string cat : {"Prop", "Exercise", "Command"}) {
      CAPTURE(lang);
      CAPTURE(cat);
      CompiledGrammar cg = compile_cfg(c, default_style(cat));
      auto r = oracle::check_completion(c, cg, cat, 3, pool(), lang == "eng");
      for (const auto& f : r.failures) MESSAGE(f);
      CHECK(r.prefixes > r.sentences);
      CHECK(r.ok());
    }
  }
}

TEST_CASE("completion oracle on hand-picked prefixes") {
  const ConcreteGrammar& eng = test::concrete("eng.gfc");
  CompiledGrammar cg = compile_cfg(eng);
  oracle::ContinuationOracle o(cg, "Prop");
  for (std::string t : {"Gamma", "is", "greater", "than", "pi", "raised", "to"}) o.push(t);
  auto c = o.current();
  CHECK(c.next_tokens.count(kVariableClass));
  CHECK(c.next_tokens.count(kIntegerClass));
  CHECK(!c.complete);
  o.push("x");
  CHECK(o.current().complete);
  o.pop();
  CHECK(!o.current().complete);
}
