// Domain repair advice for a flawed plan. Advice changes the domain, never the
// plan: option A synthesizes a new achiever action, option B lists edits to
// existing operators.

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pddlwb/pddl.hpp"
#include "pddlwb/validator.hpp"
#include "pddlwb/workspace.hpp"

namespace pddlwb::repair {

/// A parameter-free-precondition action whose only effect establishes
/// (or, for `forbid-*`, removes) the flawed literal.
struct AchieverProposal {
  pddl::OperatorSchema action;
  /// Ground instance that fixes the flaw, e.g. (achieve-in pkg trk).
  pddl::PlanStep instance;
  val::Unsatisfied target;

  friend bool operator==(const AchieverProposal&, const AchieverProposal&) = default;
};

enum class ModificationKind { AddEffectToEarlierStep, RemovePrecondition, RemoveOffendingDeleteEffect };

std::string_view to_string(ModificationKind kind) noexcept;

struct ModificationProposal {
  ModificationKind kind = ModificationKind::AddEffectToEarlierStep;
  std::string target_operator;
  /// Parameter count of the target when the advice was made; used to detect
  /// stale advice.
  std::size_t target_arity = 0;
  /// Lifted over the target operator's parameters. For RemovePrecondition
  /// and RemoveOffendingDeleteEffect this is the literal to drop; for
  /// AddEffectToEarlierStep the effect to add.
  pddl::Literal change;
  std::optional<std::size_t> source_step;
  /// The ground literal this proposal addresses.
  val::Unsatisfied target;

  friend bool operator==(const ModificationProposal&, const ModificationProposal&) = default;
};

struct RepairAdvice {
  /// Set for inapplicable-step flaws; unset when the plan ran but missed the goal.
  std::optional<val::Flaw> flaw;
  /// The literals advice is produced for: the flaw's unsatisfied list, or the
  /// unsatisfied goal literals.
  std::vector<val::Unsatisfied> targets;
  /// Step before which an achiever instance must run (plan length + 1 for goals).
  std::size_t insert_before = 0;
  AchieverProposal option_a;
  std::vector<ModificationProposal> option_b;
  std::string advice_text;

  friend bool operator==(const RepairAdvice&, const RepairAdvice&) = default;
};

/// Throws Error{NoFlaw} for valid plans and for reports that stopped on a
/// bind failure.
RepairAdvice advise(const pddl::DomainAst& domain, const pddl::ProblemAst& problem,
                    const pddl::Plan& plan, const val::ValidationReport& report);

struct ChooseA {};
struct ChooseB {
  std::size_t index = 0;
};
using Choice = std::variant<ChooseA, ChooseB>;

struct RepairResult {
  pddl::DomainAst domain;
  std::vector<ws::Diagnostic> diagnostics;
  /// Name of the inserted achiever (option A only; may carry a numeric
  /// suffix when the default name was taken).
  std::optional<std::string> achiever_name;
};

/// Throws Error{StaleAdvice} when the target operator is gone, changed
/// arity, or no longer holds the literal to remove; Error{UnknownChoice}
/// for an out-of-range option B index.
RepairResult apply_advice(const pddl::DomainAst& domain, const RepairAdvice& advice,
                          const Choice& choice);

/// The plan with the achiever instance (under `achiever_name`) inserted
/// before the flawed step, or appended for goal failures.
pddl::Plan insert_achiever(const pddl::Plan& plan, const RepairAdvice& advice,
                           const std::string& achiever_name);

}  // namespace pddlwb::repair
