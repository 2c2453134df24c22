#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccfg {

enum class ErrorKind {
  // grammar text
  MissingArrow,
  InvalidNonterminal,
  CounterExprUnsupported,
  MalformedConstraint,
  NonPositiveSubscript,
  NullGrammar,
  MalformedDocument,
  // derivation
  RetriesExhausted,
  NodeBudgetExceeded,
  OutputBudgetExceeded,
  UnboundCounter,
  UndefinedNonterminal,
  // scoring / harness
  TruthNotWellFormed,
  EmptySolutionSet,
  EmptyTestSet,
  EmptyCorpus,
  UnreadablePath,
  ReferenceFailed,
  EmptyTestCase,
  InvalidArgument,
  OracleSpawnError,
  OracleProtocolError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingArrow: return "MissingArrow";
    case ErrorKind::InvalidNonterminal: return "InvalidNonterminal";
    case ErrorKind::CounterExprUnsupported: return "CounterExprUnsupported";
    case ErrorKind::MalformedConstraint: return "MalformedConstraint";
    case ErrorKind::NonPositiveSubscript: return "NonPositiveSubscript";
    case ErrorKind::NullGrammar: return "NullGrammar";
    case ErrorKind::MalformedDocument: return "MalformedDocument";
    case ErrorKind::RetriesExhausted: return "RetriesExhausted";
    case ErrorKind::NodeBudgetExceeded: return "NodeBudgetExceeded";
    case ErrorKind::OutputBudgetExceeded: return "OutputBudgetExceeded";
    case ErrorKind::UnboundCounter: return "UnboundCounter";
    case ErrorKind::UndefinedNonterminal: return "UndefinedNonterminal";
    case ErrorKind::TruthNotWellFormed: return "TruthNotWellFormed";
    case ErrorKind::EmptySolutionSet: return "EmptySolutionSet";
    case ErrorKind::EmptyTestSet: return "EmptyTestSet";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::UnreadablePath: return "UnreadablePath";
    case ErrorKind::ReferenceFailed: return "ReferenceFailed";
    case ErrorKind::EmptyTestCase: return "EmptyTestCase";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::OracleSpawnError: return "OracleSpawnError";
    case ErrorKind::OracleProtocolError: return "OracleProtocolError";
  }
  return "Unknown";
}

/// Every fault raised by the library carries a kind so callers can branch
/// without matching on message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace ccfg
