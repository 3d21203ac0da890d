#include "mgl/error.hpp"

namespace mgl {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownCategory: return "UnknownCategory";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::TypeMismatch: return "TypeMismatch";
    case Errc::UnknownConstructor: return "UnknownConstructor";
    case Errc::ArityError: return "ArityError";
    case Errc::NotAVariable: return "NotAVariable";
    case Errc::InvalidLeaf: return "InvalidLeaf";
    case Errc::MissingTemplate: return "MissingTemplate";
    case Errc::BadSlotIndex: return "BadSlotIndex";
    case Errc::UnknownAttribute: return "UnknownAttribute";
    case Errc::IncompleteSelect: return "IncompleteSelect";
    case Errc::IllTypedTree: return "IllTypedTree";
    case Errc::NonLinearizableTemplate: return "NonLinearizableTemplate";
    case Errc::UnknownToken: return "UnknownToken";
    case Errc::NoParse: return "NoParse";
    case Errc::UnknownLanguage: return "UnknownLanguage";
    case Errc::Ambiguous: return "Ambiguous";
    case Errc::EvalError: return "EvalError";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::UnsupportedExpression: return "UnsupportedExpression";
    case Errc::NonGroundBound: return "NonGroundBound";
    case Errc::UnboundBodyVariable: return "UnboundBodyVariable";
    case Errc::UnsupportedIntegrand: return "UnsupportedIntegrand";
    case Errc::UnboundedInterval: return "UnboundedInterval";
    case Errc::BackendTimeout: return "BackendTimeout";
    case Errc::BackendError: return "BackendError";
    case Errc::UnmatchedSentence: return "UnmatchedSentence";
    case Errc::UnknownLemma: return "UnknownLemma";
    case Errc::NoQuestion: return "NoQuestion";
    case Errc::MissingAttribute: return "MissingAttribute";
    case Errc::NoClosure: return "NoClosure";
    case Errc::UnboundedSystem: return "UnboundedSystem";
    case Errc::NoSolutionToRender: return "NoSolutionToRender";
    case Errc::LexiconError: return "LexiconError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mgl
