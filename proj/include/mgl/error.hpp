#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace mgl {

enum class Errc {
  // grammar kernel
  SyntaxError,
  UnknownCategory,
  DuplicateName,
  TypeMismatch,
  UnknownConstructor,
  ArityError,
  NotAVariable,
  InvalidLeaf,
  // linearizer
  MissingTemplate,
  BadSlotIndex,
  UnknownAttribute,
  IncompleteSelect,
  IllTypedTree,
  // parser
  NonLinearizableTemplate,
  UnknownToken,
  NoParse,
  UnknownLanguage,
  Ambiguous,
  // cas bridge
  EvalError,
  DivisionByZero,
  UnsupportedExpression,
  NonGroundBound,
  UnboundBodyVariable,
  UnsupportedIntegrand,
  UnboundedInterval,
  BackendTimeout,
  BackendError,
  // word problems
  UnmatchedSentence,
  UnknownLemma,
  NoQuestion,
  MissingAttribute,
  NoClosure,
  UnboundedSystem,
  NoSolutionToRender,
  LexiconError,
  // service
  ConfigError,
  IoError,
};

const char* to_string(Errc code);

/// Every failure raised by the library. `info` carries the structured
/// payload of the error (offending token, position, expected category...)
/// so the service layer can serialize it without parsing messages.
class Error : public std::runtime_error {
 public:
  using Info = std::map<std::string, std::string>;

  Error(Errc code, const std::string& message, Info info = {})
      : std::runtime_error(message), code_(code), info_(std::move(info)) {}

  Errc code() const noexcept { return code_; }
  const Info& info() const noexcept { return info_; }

  std::string get(const std::string& key) const {
    auto it = info_.find(key);
    return it == info_.end() ? std::string() : it->second;
  }

 private:
  Errc code_;
  Info info_;
};

}  // namespace mgl
