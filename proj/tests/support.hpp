#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <memory>
#include <string>

#include "mgl/concrete_grammar.hpp"
#include "mgl/error.hpp"

namespace mgl::test {

inline std::filesystem::path data_dir() { return MGL_DATA_DIR; }

inline std::shared_ptr<const AbstractGrammar> mini() {
  static auto g = std::make_shared<const AbstractGrammar>(load_abstract_file(data_dir() / "mgl-mini.gfa"));
  return g;
}

inline const ConcreteGrammar& concrete(const std::string& file) {
  static std::map<std::string, std::unique_ptr<ConcreteGrammar>> cache;
  auto& slot = cache[file];
  if (!slot) slot = std::make_unique<ConcreteGrammar>(load_concrete_file(data_dir() / file, mini()));
  return *slot;
}

inline Tree tree(const std::string& text) { return parse_tree(text, *mini()); }

/// Code of the mgl::Error thrown by `f`, if any.
inline std::optional<Errc> error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace mgl::test
