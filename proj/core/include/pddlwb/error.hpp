#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pddlwb {

/// Error codes shared by every module. Each code names one failure the
/// library can report; the CLI and the HTTP service map them to exit codes
/// and status codes.
enum class Errc {
  // Parsing
  UnbalancedParens,
  UnsupportedRequirement,
  UnsupportedConstruct,
  MalformedSection,
  VariableInGroundContext,
  EmptyStep,
  UnknownType,
  // Knowledge base
  EmptyTemplate,
  MalformedToken,
  MalformedLine,
  DuplicateTemplate,
  // Workspace
  UnknownTarget,
  SchemaViolation,
  UnsupportedVersion,
  NoDomainContent,
  UnknownProblem,
  RefusedOnErrors,
  // Validation
  UnknownAction,
  ArityMismatch,
  UnknownObject,
  TypeMismatch,
  IndexBeyondFlaw,
  IndexOutOfRange,
  // Repair
  NoFlaw,
  StaleAdvice,
  UnknownChoice,
  // Planning
  ConfigError,
  SpawnError,
  TimeoutError,
  NoPlanInOutput,
  NoPlanFound,
  LimitExceeded,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

struct Location {
  int line = 1;
  int column = 1;

  friend bool operator==(const Location&, const Location&) = default;
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message,
        std::optional<Location> where = std::nullopt);

  Errc code() const noexcept { return code_; }
  const std::optional<Location>& where() const noexcept { return where_; }
  /// The message without the code prefix or location suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::optional<Location> where_;
  std::string detail_;
};

}  // namespace pddlwb
