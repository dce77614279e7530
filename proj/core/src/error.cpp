#include "pddlwb/error.hpp"

namespace pddlwb {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::UnbalancedParens: return "UnbalancedParens";
    case Errc::UnsupportedRequirement: return "UnsupportedRequirement";
    case Errc::UnsupportedConstruct: return "UnsupportedConstruct";
    case Errc::MalformedSection: return "MalformedSection";
    case Errc::VariableInGroundContext: return "VariableInGroundContext";
    case Errc::EmptyStep: return "EmptyStep";
    case Errc::UnknownType: return "UnknownType";
    case Errc::EmptyTemplate: return "EmptyTemplate";
    case Errc::MalformedToken: return "MalformedToken";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::DuplicateTemplate: return "DuplicateTemplate";
    case Errc::UnknownTarget: return "UnknownTarget";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::NoDomainContent: return "NoDomainContent";
    case Errc::UnknownProblem: return "UnknownProblem";
    case Errc::RefusedOnErrors: return "RefusedOnErrors";
    case Errc::UnknownAction: return "UnknownAction";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::UnknownObject: return "UnknownObject";
    case Errc::TypeMismatch: return "TypeMismatch";
    case Errc::IndexBeyondFlaw: return "IndexBeyondFlaw";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NoFlaw: return "NoFlaw";
    case Errc::StaleAdvice: return "StaleAdvice";
    case Errc::UnknownChoice: return "UnknownChoice";
    case Errc::ConfigError: return "ConfigError";
    case Errc::SpawnError: return "SpawnError";
    case Errc::TimeoutError: return "TimeoutError";
    case Errc::NoPlanInOutput: return "NoPlanInOutput";
    case Errc::NoPlanFound: return "NoPlanFound";
    case Errc::LimitExceeded: return "LimitExceeded";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string format(Errc code, const std::string& message,
                   const std::optional<Location>& where) {
  std::string out(to_string(code));
  out += ": ";
  out += message;
  if (where) {
    out += " (line " + std::to_string(where->line) + ", column " +
           std::to_string(where->column) + ")";
  }
  return out;
}

}  // namespace

Error::Error(Errc code, const std::string& message,
             std::optional<Location> where)
    : std::runtime_error(format(code, message, where)),
      code_(code),
      where_(where),
      detail_(message) {}

}  // namespace pddlwb
