#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "mgl/concrete_grammar.hpp"

namespace mgl {

/// Intermediate linearization value of a subtree.
struct Phrase {
  std::vector<std::string> tokens;  // may contain kBind markers
  std::map<std::string, std::string> attrs;  // absent attributes take the declared default
  int prec = kAtomicPrec;
};

/// Answers embed values in operator style; everything else is descriptive.
Style default_style(const Category& cat);

/// Bottom-up template evaluation without glue, casing or punctuation.
/// The tree is assumed well typed.
Phrase linearize_phrase(const Tree& t, const ConcreteGrammar& c, Style style);

/// Token stream as the parser sees it: template tokens with bind markers
/// removed, plus the terminal punctuation mark. No glue, no casing.
std::vector<std::string> linearize_tokens(const Tree& t, const ConcreteGrammar& c, Style style);

/// Full surface string: phrase, glue, sentence casing, terminal punctuation.
/// Throws IllTypedTree when `t` does not typecheck.
std::string linearize(const Tree& t, const ConcreteGrammar& c, Style style);

/// Phrase text after glue only (no casing, no punctuation).
std::string linearize_plain(const Tree& t, const ConcreteGrammar& c, Style style);

/// One left-to-right merge pass over adjacent tokens.
std::vector<std::string> apply_glue(std::span<const std::string> tokens, std::span<const GlueRule> rules);

/// Joins tokens with single spaces; bind markers join without a space and
/// `, . ? ! ;` attach to the preceding token.
std::string assemble(std::span<const std::string> tokens);

/// apply_glue followed by assemble.
std::string glue_tokens(std::span<const std::string> tokens, std::span<const GlueRule> rules);

/// Upper-cases the first letter (ASCII and Latin-1 lowercase letters in UTF-8).
std::string capitalize_first(std::string s);

}  // namespace mgl
