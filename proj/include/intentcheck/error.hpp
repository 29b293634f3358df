#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace intentcheck {

enum class ErrorCode {
  UnknownFunction,
  ArityMismatch,
  TypeMismatch,
  SubstitutionCollision,
  ResourceBoundExceeded,
  SignatureMismatch,
  NonBooleanCondition,
  NonListIterable,
  UnboundVariable,
  UnknownStatefulFunction,
  UnregisteredLabel,
  SyntaxError,
  UnknownVerbDesc,
  KbMiss,
  KbParseError,
  KbDuplicateEntry,
  YamlSyntaxError,
  NotAPlaybook,
  UnsupportedFeature,
  UnknownModule,
  InvalidEnumValue,
  UnknownFactVariable,
  DuplicateArgument,
  UndeclaredEnum,
  UndeclaredElement,
  UndeclaredAttribute,
  MissingRequired,
  ChoiceViolation,
  UnknownArgument,
  TypeCoercionFailure,
  MalformedSuite,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownFunction: return "unknown-function";
    case ErrorCode::ArityMismatch: return "arity-mismatch";
    case ErrorCode::TypeMismatch: return "type-mismatch";
    case ErrorCode::SubstitutionCollision: return "substitution-collision";
    case ErrorCode::ResourceBoundExceeded: return "resource-bound-exceeded";
    case ErrorCode::SignatureMismatch: return "signature-mismatch";
    case ErrorCode::NonBooleanCondition: return "non-boolean-condition";
    case ErrorCode::NonListIterable: return "non-list-iterable";
    case ErrorCode::UnboundVariable: return "unbound-variable";
    case ErrorCode::UnknownStatefulFunction: return "unknown-stateful-function";
    case ErrorCode::UnregisteredLabel: return "unregistered-label";
    case ErrorCode::SyntaxError: return "syntax-error";
    case ErrorCode::UnknownVerbDesc: return "unknown-verb-desc";
    case ErrorCode::KbMiss: return "kb-miss";
    case ErrorCode::KbParseError: return "parse-error";
    case ErrorCode::KbDuplicateEntry: return "duplicate-entry";
    case ErrorCode::YamlSyntaxError: return "yaml-syntax-error";
    case ErrorCode::NotAPlaybook: return "not-a-playbook";
    case ErrorCode::UnsupportedFeature: return "unsupported-feature";
    case ErrorCode::UnknownModule: return "unknown-module";
    case ErrorCode::InvalidEnumValue: return "invalid-enum-value";
    case ErrorCode::UnknownFactVariable: return "unknown-fact-variable";
    case ErrorCode::DuplicateArgument: return "duplicate-argument";
    case ErrorCode::UndeclaredEnum: return "undeclared-enum";
    case ErrorCode::UndeclaredElement: return "undeclared-element";
    case ErrorCode::UndeclaredAttribute: return "undeclared-attribute";
    case ErrorCode::MissingRequired: return "missing-required";
    case ErrorCode::ChoiceViolation: return "choice-violation";
    case ErrorCode::UnknownArgument: return "unknown-argument";
    case ErrorCode::TypeCoercionFailure: return "type-coercion-failure";
    case ErrorCode::MalformedSuite: return "malformed-suite";
    case ErrorCode::Io: return "io-error";
  }
  return "error";
}

/// Every failure raised by the toolchain carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace intentcheck
