// STRIPS plan validation: grounding plan steps, applicability, progression,
// per-step world states, causal links and first-flaw capture.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pddlwb/pddl.hpp"

namespace pddlwb::val {

using GroundAtom = pddl::Atom;
using AtomSet = std::set<GroundAtom>;

struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  AtomSet pre_pos;
  AtomSet pre_neg;
  AtomSet add;
  AtomSet del;

  pddl::PlanStep step() const { return {name, args}; }
  friend bool operator==(const GroundAction&, const GroundAction&) = default;
};

/// Closed world: atoms not in the set are false. std::set gives the
/// canonical lexicographic order.
struct WorldState {
  AtomSet atoms;

  bool holds(const GroundAtom& a) const { return atoms.contains(a); }
  friend bool operator==(const WorldState&, const WorldState&) = default;
};

WorldState initial_state(const pddl::ProblemAst& problem);

enum class Polarity { Positive, Negative };
enum class Reason { Missing, UnexpectedlyPresent };

std::string_view to_string(Polarity p) noexcept;
std::string_view to_string(Reason r) noexcept;

struct Unsatisfied {
  GroundAtom atom;
  Polarity polarity = Polarity::Positive;
  Reason reason = Reason::Missing;

  friend bool operator==(const Unsatisfied&, const Unsatisfied&) = default;
};

struct Applicability {
  bool applicable = true;
  std::vector<Unsatisfied> unsatisfied;
};

/// The first inapplicable step of a plan.
struct Flaw {
  std::size_t step_index = 0;  // 1-based
  pddl::PlanStep action;
  std::vector<Unsatisfied> unsatisfied;

  friend bool operator==(const Flaw&, const Flaw&) = default;
};

/// A plan step that could not be grounded (unknown action, wrong arity,
/// unknown object, type mismatch). Distinct from a semantic Flaw.
struct BindFailure {
  std::size_t step_index = 0;  // 1-based
  pddl::PlanStep step;
  Errc code = Errc::UnknownAction;
  std::string message;

  friend bool operator==(const BindFailure&, const BindFailure&) = default;
};

/// Producer 0 stands for the initial state.
struct CausalLink {
  std::size_t producer = 0;
  std::size_t consumer = 0;
  GroundAtom atom;
  Polarity polarity = Polarity::Positive;

  friend bool operator==(const CausalLink&, const CausalLink&) = default;
};

struct StepRecord {
  GroundAction action;
  bool applicable = false;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct ValidationReport {
  /// states[0] is the initial state; one more entry per applied step.
  std::vector<WorldState> states;
  /// Every bound step; the last one is inapplicable when `flaw` is set.
  std::vector<StepRecord> steps;
  std::optional<Flaw> flaw;
  std::optional<BindFailure> bind_failure;
  /// Present only when every step applied.
  std::optional<bool> goal_satisfied;
  bool valid = false;
  std::vector<CausalLink> links;

  std::size_t applied_steps() const { return states.empty() ? 0 : states.size() - 1; }
  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Substitutes the step's objects for the operator parameters, type-checking
/// each argument. Throws Error{UnknownAction | ArityMismatch | UnknownObject |
/// TypeMismatch}.
GroundAction bind_step(const pddl::DomainAst& domain, const pddl::ProblemAst& problem,
                       const pddl::PlanStep& step);

Applicability applicability(const WorldState& state, const GroundAction& action);

/// (state \ del) ∪ add. Does not check applicability.
WorldState progress(const WorldState& state, const GroundAction& action);

/// Goal literals not satisfied in `state`.
std::vector<Unsatisfied> unsatisfied_goals(const WorldState& state,
                                           const std::vector<pddl::Literal>& goal);

ValidationReport validate(const pddl::DomainAst& domain, const pddl::ProblemAst& problem,
                          const pddl::Plan& plan);

/// Throws Error{IndexBeyondFlaw} when k exceeds the applied prefix.
const WorldState& state_at(const ValidationReport& report, std::size_t k);

/// Latest-producer links for every applied step, ordered by
/// (consumer, atom, polarity).
std::vector<CausalLink> causal_links(const ValidationReport& report);

/// Throws Error{IndexOutOfRange} unless 1 <= j <= steps.size().
const GroundAction& step_overview(const ValidationReport& report, std::size_t j);

}  // namespace pddlwb::val
