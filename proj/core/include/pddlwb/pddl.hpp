// Abstract syntax, parser and printer for the supported PDDL subset:
// STRIPS with typing and negative preconditions, plus plain-text plans.

#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pddlwb/error.hpp"

namespace pddlwb::pddl {

inline constexpr std::string_view kRootType = "object";

enum class Requirement { Strips, Typing, NegativePreconditions };

std::string_view to_string(Requirement r) noexcept;

/// Requirements in declaration order, without duplicates.
struct RequirementSet {
  std::vector<Requirement> flags;

  bool has(Requirement r) const;
  void add(Requirement r);

  friend bool operator==(const RequirementSet&, const RequirementSet&) = default;
};

/// Type name -> parent type name. The root `object` is implicit and never
/// stored as a key.
class TypeHierarchy {
 public:
  TypeHierarchy() = default;

  /// Adds or re-parents `name`. Declaring `object` itself is a no-op.
  void declare(const std::string& name, const std::string& parent);

  bool contains(std::string_view name) const;
  /// Parent of a declared type; `object` for root children.
  const std::string& parent_of(const std::string& name) const;
  const std::map<std::string, std::string>& entries() const { return parents_; }
  bool empty() const { return parents_.empty(); }

  /// Reflexive-transitive parent walk. Throws Error{UnknownType} if either
  /// name is undeclared and not `object`.
  bool is_subtype(const std::string& sub, const std::string& sup) const;

  /// Types reachable from the root, parents before children, siblings sorted.
  std::vector<std::string> topological() const;

  friend bool operator==(const TypeHierarchy&, const TypeHierarchy&) = default;

 private:
  std::map<std::string, std::string> parents_;
};

/// `name - type`, used for parameters, objects and constants.
struct TypedName {
  std::string name;
  std::string type;

  friend bool operator==(const TypedName&, const TypedName&) = default;
};

inline bool is_variable(std::string_view term) {
  return !term.empty() && term.front() == '?';
}

/// Predicate applied to terms. Terms starting with `?` are variables; the
/// rest are object constants.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

std::string to_string(const Atom& atom);

struct Literal {
  bool positive = true;
  Atom atom;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

std::string to_string(const Literal& literal);

struct PredicateDecl {
  std::string name;
  std::vector<TypedName> params;

  std::size_t arity() const { return params.size(); }
  friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
};

std::string to_string(const PredicateDecl& decl);

/// Lifted action. Positive effects are adds, negative effects deletes.
struct OperatorSchema {
  std::string name;
  std::vector<TypedName> params;
  std::vector<Literal> preconditions;
  std::vector<Literal> effects;

  friend bool operator==(const OperatorSchema&, const OperatorSchema&) = default;
};

struct DomainAst {
  std::string name;
  RequirementSet requirements;
  TypeHierarchy types;
  std::vector<PredicateDecl> predicates;
  std::vector<TypedName> constants;
  std::vector<OperatorSchema> actions;

  const OperatorSchema* find_action(std::string_view action) const;
  const PredicateDecl* find_predicate(std::string_view predicate) const;

  friend bool operator==(const DomainAst&, const DomainAst&) = default;
};

struct ProblemAst {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  std::vector<Atom> init;
  std::vector<Literal> goal;

  friend bool operator==(const ProblemAst&, const ProblemAst&) = default;
};

struct PlanStep {
  std::string action;
  std::vector<std::string> args;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
  friend auto operator<=>(const PlanStep&, const PlanStep&) = default;
};

std::string to_string(const PlanStep& step);

/// Steps are addressed 1-based everywhere outside this vector.
struct Plan {
  std::vector<PlanStep> steps;

  friend bool operator==(const Plan&, const Plan&) = default;
};

DomainAst parse_domain(std::string_view text);
ProblemAst parse_problem(std::string_view text);
Plan parse_plan(std::string_view text);

std::string print_domain(const DomainAst& domain);
std::string print_problem(const ProblemAst& problem);
std::string print_plan(const Plan& plan);

}  // namespace pddlwb::pddl
