#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "mgl/error.hpp"
#include "mgl/linearize.hpp"
#include "mgl/parser.hpp"

namespace mgl::oracle {

struct RoundTripReport {
  std::size_t trees = 0;
  std::size_t ambiguous = 0;  // more than one reading, the original among them
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// t is among parse(tokenize(linearize(t))) for every tree of `cat` up to `depth`.
inline RoundTripReport check_round_trip(const ConcreteGrammar& c, const CompiledGrammar& cg, const Category& cat,
                                        int depth, const LeafPool& pool) {
  RoundTripReport r;
  for (const auto& t : enumerate_trees(c.abstract(), cat, depth, pool)) {
    ++r.trees;
    std::string text = linearize(t, c, cg.style());
    try {
      auto back = parse(tokenize(text, c), cat, cg);
      if (std::find(back.begin(), back.end(), t) == back.end()) {
        if (r.failures.size() < 20) r.failures.push_back(t.to_string() + ": \"" + text + "\" parses to other trees");
      } else if (back.size() > 1) {
        ++r.ambiguous;
      }
    } catch (const Error& e) {
      if (r.failures.size() < 20) r.failures.push_back(t.to_string() + ": \"" + text + "\" " + e.what());
    }
  }
  return r;
}

}  // namespace mgl::oracle
