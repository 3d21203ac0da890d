#include <algorithm>
#include <set>

#include "doctest.h"
#include "mgl/abstract_grammar.hpp"
#include "mgl/error.hpp"
#include "oracles/tree_count.hpp"
#include "support.hpp"

using namespace mgl;

namespace {

AbstractGrammar arith() { return load_abstract_file(test::data_dir() / "arith.gfa"); }

template <class F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::IoError;
}

}  // namespace

TEST_CASE("arith demo grammar loads with its two categories and seven constructors") {
  AbstractGrammar g = arith();
  CHECK(g.categories().size() == 2);
  CHECK(g.constructors().size() == 7);
  CHECK(g.find("Not")->arg_cats == std::vector<Category>{"Prop"});
  CHECK(g.find("And")->arity() == 2);
}

TEST_CASE("abstract source edge cases") {
  AbstractGrammar empty = parse_abstract_source("abstract E = {}");
  CHECK(empty.categories().empty());
  CHECK(empty.constructors().empty());

  try {
    parse_abstract_source("abstract E = { fun Succ : Nat -> Nat ; }");
    FAIL("expected UnknownCategory");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownCategory);
    CHECK(e.get("name") == "Nat");
  }
  CHECK(error_of([] { parse_abstract_source("abstract E = { cat A, A ; }"); }) == Errc::DuplicateName);
  CHECK(error_of([] { parse_abstract_source("abstract E = { cat A ;\n fun F : A -> ; }"); }) == Errc::SyntaxError);
}

TEST_CASE("shipped MGL-mini inventory") {
  const AbstractGrammar& g = *test::mini();
  std::set<Category> cats(g.categories().begin(), g.categories().end());
  CHECK(cats == std::set<Category>{"VarNum", "ValNum", "VarSet", "ValSet", "VarFun", "ValFun", "VarTensor",
                                   "ValTensor", "ValNumList", "Relation", "Prop", "Exercise", "Command", "Answer"});

  // name -> "Arg1 Arg2 -> Result"
  std::map<std::string, std::string> expected = {
      {"Var2Num", "VarNum -> ValNum"},
      {"Var2Set", "VarSet -> ValSet"},
      {"Var2Fun", "VarFun -> ValFun"},
      {"Var2Tensor", "VarTensor -> ValTensor"},
      {"IntLit", "Int -> ValNum"},
      {"BaseValNum", "ValNum ValNum -> ValNumList"},
      {"ConsValNum", "ValNum ValNumList -> ValNumList"},
      {"plus", "ValNumList -> ValNum"},
      {"minus", "ValNum ValNum -> ValNum"},
      {"times", "ValNum ValNum -> ValNum"},
      {"divide", "ValNum ValNum -> ValNum"},
      {"power", "ValNum ValNum -> ValNum"},
      {"abs", "ValNum -> ValNum"},
      {"sqrt", "ValNum -> ValNum"},
      {"summation", "VarNum ValNum ValNum ValNum -> ValNum"},
      {"pi", "-> ValNum"},
      {"gammaConst", "-> ValNum"},
      {"cos", "-> ValFun"},
      {"sin", "-> ValFun"},
      {"cosh", "-> ValFun"},
      {"tanh", "-> ValFun"},
      {"inverse", "ValFun -> ValFun"},
      {"domain", "ValFun -> ValSet"},
      {"lambda", "VarNum ValNum -> ValFun"},
      {"At", "ValFun ValNum -> ValNum"},
      {"openInterval", "ValNum ValNum -> ValSet"},
      {"closedInterval", "ValNum ValNum -> ValSet"},
      {"integralOver", "ValFun ValSet -> ValNum"},
      {"lt_num", "ValNum ValNum -> Relation"},
      {"gt_num", "ValNum ValNum -> Relation"},
      {"eq_num", "ValNum ValNum -> Relation"},
      {"leq_num", "ValNum ValNum -> Relation"},
      {"geq_num", "ValNum ValNum -> Relation"},
      {"mkProp", "Relation -> Prop"},
      {"DoCompute", "ValNum -> Exercise"},
      {"DoProve", "Prop -> Exercise"},
      {"DoSelectFromN", "VarNum ValSet Prop -> Exercise"},
      {"CComputeNum", "ValNum -> Command"},
      {"Assume", "Prop -> Command"},
      {"AssignNum", "VarNum ValNum -> Command"},
      {"SimpleNum", "ValNum -> Answer"},
      {"FeedbackNum", "ValNum ValNum -> Answer"},
      {"Assumed", "Prop -> Answer"},
      {"AssignedNum", "VarNum ValNum -> Answer"},
  };
  std::map<std::string, std::string> found;
  for (const auto& f : g.constructors()) {
    std::string sig;
    for (const auto& a : f.arg_cats) sig += a + " ";
    found[f.name] = sig + "-> " + f.result_cat;
  }
  CHECK(found == expected);
}

TEST_CASE("typecheck") {
  AbstractGrammar g = arith();
  CHECK(typecheck(parse_tree("Succ Zero", g), g) == "Nat");

  const Tree t1 = test::tree(
      "mkProp (lt_num (abs (plus (BaseValNum (Var2Num x) (Var2Num y)))) "
      "(plus (BaseValNum (abs (Var2Num x)) (abs (Var2Num y)))))");
  CHECK(typecheck(t1, *test::mini()) == "Prop");

  try {
    typecheck(Tree::node("Succ", {Tree::node("Even", {Tree::node("Zero")})}), g);
    FAIL("expected TypeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TypeMismatch);
    CHECK(e.get("path") == "0");
    CHECK(e.get("expected") == "Nat");
    CHECK(e.get("found") == "Prop");
  }
  CHECK(error_of([&] { typecheck(Tree::node("Pred", {Tree::node("Zero")}), g); }) == Errc::UnknownConstructor);
  try {
    typecheck(Tree::node("Succ"), g);
    FAIL("expected ArityError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ArityError);
    CHECK(e.get("expected") == "1");
    CHECK(e.get("found") == "0");
  }
}

TEST_CASE("promote wraps variables in their promotion constructor") {
  Tree x = Tree::variable("x", "VarNum");
  Tree px = promote(x);
  CHECK(px.to_string() == "Var2Num x");
  CHECK(typecheck(px, *test::mini()) == "ValNum");
  CHECK(promote(Tree::variable("s", "VarSet")).ctor() == "Var2Set");
  CHECK(typecheck(promote(Tree::variable("s", "VarSet")), *test::mini()) == "ValSet");
  CHECK(error_of([&] { promote(px); }) == Errc::NotAVariable);
  CHECK(promote(px.child(0)) == px);
}

TEST_CASE("enumerate_trees on the arith demo") {
  AbstractGrammar g = arith();
  auto nat = enumerate_trees(g, "Nat", 2, {});
  REQUIRE(nat.size() == 2);
  CHECK(nat[0].to_string() == "Zero");
  CHECK(nat[1].to_string() == "Succ Zero");

  auto prop = enumerate_trees(g, "Prop", 2, {});
  REQUIRE(prop.size() == 2);
  CHECK(prop[0].to_string() == "Even Zero");
  CHECK(prop[1].to_string() == "Prime Zero");
}

TEST_CASE("enumerate_trees agrees with the counting recurrence") {
  const AbstractGrammar& g = *test::mini();
  LeafPool pool = LeafPool::numeric({"x"}, {});
  oracle::TreeCounter counter(g, {{"VarNum", 1}});

  auto d3 = enumerate_trees(g, "Prop", 3, pool);
  CHECK(static_cast<long long>(d3.size()) == counter.count("Prop", 3));
  CHECK(d3.size() == 20);  // frozen
  for (const auto& t : d3) CHECK(typecheck(t, g) == "Prop");

  LeafPool wide = LeafPool::numeric({"x", "y"}, {0, 1, 2});
  oracle::TreeCounter wide_counter(g, {{"VarNum", 2}, {"Int", 3}});
  const std::pair<Category, int> cases[] = {{"ValNum", 3}, {"Prop", 4}, {"Exercise", 4}, {"Command", 4}, {"Answer", 3}};
  for (const auto& [cat, depth] : cases) {
    auto trees = enumerate_trees(g, cat, depth, wide);
    CHECK(static_cast<long long>(trees.size()) == wide_counter.count(cat, depth));
    std::set<Tree> distinct(trees.begin(), trees.end());
    CHECK(distinct.size() == trees.size());
    for (const auto& t : trees) {
      CHECK(t.depth() <= depth);
      REQUIRE(typecheck(t, g) == cat);
    }
  }
}

TEST_CASE("tree notation round trip") {
  const Tree t = test::tree("DoSelectFromN y (domain (inverse tanh)) (mkProp (gt_num (At cosh (Var2Num y)) pi))");
  CHECK(typecheck(t, *test::mini()) == "Exercise");
  CHECK(test::tree(t.to_string()) == t);
  CHECK(t.depth() == 6);
}
