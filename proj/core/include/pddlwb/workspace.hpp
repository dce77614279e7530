// The three-level project model: language declaration (classes, predicates,
// constants), operators, and problems. Later levels reference only names
// from the language level; broken references are reported as diagnostics
// rather than rejected, so half-finished models can be edited and saved.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pddlwb/knowledge_base.hpp"
#include "pddlwb/pddl.hpp"

namespace pddlwb::ws {

enum class Level { Language = 1, Operators = 2, Problems = 3 };

enum class Severity { Error, Warning };

enum class DiagCode {
  UnknownType,
  UnknownPredicate,
  ArityMismatch,
  ArgTypeMismatch,
  UnboundVariable,
  DuplicateDeclaration,
  DanglingReference,
  HierarchyCycle,
  UnknownObject,
  ContradictoryEffect,
};

std::string_view to_string(Level level) noexcept;
std::string_view to_string(Severity severity) noexcept;
std::string_view to_string(DiagCode code) noexcept;

struct Locus {
  Level level = Level::Language;
  std::string owner;
  std::string detail;

  friend bool operator==(const Locus&, const Locus&) = default;
};

struct Diagnostic {
  Severity severity = Severity::Error;
  DiagCode code = DiagCode::UnknownType;
  Locus locus;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::string to_string(const Diagnostic& d);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

enum class SymbolKind { Class, Predicate, Operator, Problem };

std::string_view to_string(SymbolKind kind) noexcept;
std::optional<SymbolKind> symbol_kind_from_string(std::string_view s);

/// A language-level name removed by an edit. References to it are reported
/// as DanglingReference instead of UnknownType/UnknownPredicate until the
/// name is declared again.
struct RetiredSymbol {
  SymbolKind kind = SymbolKind::Class;
  std::string name;

  friend bool operator==(const RetiredSymbol&, const RetiredSymbol&) = default;
};

struct Language {
  std::vector<kb::TypeDecl> classes;
  std::vector<pddl::PredicateDecl> predicates;
  std::vector<pddl::TypedName> constants;
  std::vector<RetiredSymbol> retired;

  friend bool operator==(const Language&, const Language&) = default;
};

struct Project {
  std::string name;
  kb::KnowledgeBase kb;
  Language language;
  std::vector<pddl::OperatorSchema> operators;
  std::vector<pddl::ProblemAst> problems;

  const pddl::ProblemAst* find_problem(std::string_view problem) const;

  friend bool operator==(const Project&, const Project&) = default;
};

namespace edit {

struct DeclareClass {
  std::string name;
  std::string parent;
};
struct RemoveClass {
  std::string name;
};
struct DeclarePredicate {
  pddl::PredicateDecl decl;
};
struct RemovePredicate {
  std::string name;
  std::size_t arity = 0;
};
struct UpsertOperator {
  pddl::OperatorSchema op;
};
struct RemoveOperator {
  std::string name;
};
struct UpsertProblem {
  pddl::ProblemAst problem;
};
struct RemoveProblem {
  std::string name;
};
struct RenameSymbol {
  SymbolKind kind = SymbolKind::Class;
  std::string old_name;
  std::string new_name;
};

}  // namespace edit

using Edit = std::variant<edit::DeclareClass, edit::RemoveClass, edit::DeclarePredicate,
                          edit::RemovePredicate, edit::UpsertOperator, edit::RemoveOperator,
                          edit::UpsertProblem, edit::RemoveProblem, edit::RenameSymbol>;

struct EditResult {
  Project project;
  std::vector<Diagnostic> diagnostics;
};

Project new_project(std::string name);

/// Applies one edit and re-checks the whole project. Removals never cascade:
/// dependents stay and show up as DanglingReference diagnostics.
/// Throws Error{UnknownTarget} when removing or renaming a missing name.
EditResult apply_edit(const Project& project, const Edit& e);

/// Deterministic, ordered by (level, owner, code, detail).
std::vector<Diagnostic> check_consistency(const Project& project);

/// XML persistence. Round-trips any representable project, including ones
/// with consistency defects.
std::string export_xml(const Project& project);
/// Throws Error{SchemaViolation} (with the element path in the message) or
/// Error{UnsupportedVersion}.
Project import_xml(std::string_view text);

/// Requirements derived from content: strips, plus typing when any class is
/// declared, plus negative-preconditions when a negative precondition or
/// goal appears.
pddl::RequirementSet derive_requirements(const Project& project);

/// Domain view of the project, without consistency gating.
pddl::DomainAst to_domain(const Project& project);

/// Builds a project from parsed PDDL. Types keep parent-before-child order.
Project project_from_pddl(const pddl::DomainAst& domain,
                          std::vector<pddl::ProblemAst> problems = {},
                          kb::KnowledgeBase knowledge = {});

struct PddlExport {
  std::string domain;
  std::optional<std::string> problem;
};

/// Throws Error{NoDomainContent}, Error{UnknownProblem}, or
/// Error{RefusedOnErrors} when any error-severity diagnostic exists.
PddlExport export_pddl(const Project& project,
                       const std::optional<std::string>& problem_name = std::nullopt);

}  // namespace pddlwb::ws
