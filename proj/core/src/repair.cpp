#include "pddlwb/repair.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

namespace pddlwb::repair {

using pddl::Literal;

std::string_view to_string(ModificationKind kind) noexcept {
  switch (kind) {
    case ModificationKind::AddEffectToEarlierStep: return "AddEffectToEarlierStep";
    case ModificationKind::RemovePrecondition: return "RemovePrecondition";
    case ModificationKind::RemoveOffendingDeleteEffect: return "RemoveOffendingDeleteEffect";
  }
  return "";
}

namespace {

using Binding = std::map<std::string, std::string>;

Binding bind_params(const pddl::OperatorSchema& op, const pddl::PlanStep& step) {
  Binding b;
  for (std::size_t i = 0; i < op.params.size() && i < step.args.size(); ++i) {
    b[op.params[i].name] = step.args[i];
  }
  return b;
}

pddl::Atom ground(const pddl::Atom& lifted, const Binding& b) {
  pddl::Atom g{lifted.predicate, {}};
  for (const auto& term : lifted.args) {
    auto it = b.find(term);
    g.args.push_back(it == b.end() ? term : it->second);
  }
  return g;
}

/// Replaces every object of `atom` by the first parameter bound to it;
/// nullopt when some object has no parameter.
std::optional<pddl::Atom> lift(const pddl::Atom& atom, const pddl::OperatorSchema& op,
                               const pddl::PlanStep& step) {
  pddl::Atom lifted{atom.predicate, {}};
  for (const auto& obj : atom.args) {
    std::optional<std::string> param;
    for (std::size_t i = 0; i < op.params.size() && i < step.args.size(); ++i) {
      if (step.args[i] == obj) {
        param = op.params[i].name;
        break;
      }
    }
    if (!param) return std::nullopt;
    lifted.args.push_back(*param);
  }
  return lifted;
}

std::string object_type(const pddl::DomainAst& d, const pddl::ProblemAst& p,
                        const std::string& obj) {
  for (const auto& o : p.objects) {
    if (o.name == obj) return o.type;
  }
  for (const auto& c : d.constants) {
    if (c.name == obj) return c.type;
  }
  return std::string(pddl::kRootType);
}

AchieverProposal make_achiever(const pddl::DomainAst& d, const pddl::ProblemAst& p,
                               const val::Unsatisfied& target) {
  const bool establish = target.polarity == val::Polarity::Positive;
  AchieverProposal a;
  a.target = target;
  a.action.name = (establish ? "achieve-" : "forbid-") + target.atom.predicate;
  pddl::Atom effect{target.atom.predicate, {}};
  for (std::size_t i = 0; i < target.atom.args.size(); ++i) {
    const std::string var = "?x" + std::to_string(i + 1);
    a.action.params.push_back({var, object_type(d, p, target.atom.args[i])});
    effect.args.push_back(var);
  }
  a.action.effects.push_back({establish, std::move(effect)});
  a.instance = {a.action.name, target.atom.args};
  return a;
}

bool literal_matches(const Literal& lifted, const Binding& b, const val::GroundAtom& atom,
                     bool positive) {
  return lifted.positive == positive && ground(lifted.atom, b) == atom;
}

std::string describe(const val::Unsatisfied& u) {
  const std::string atom = pddl::to_string(u.atom);
  return u.reason == val::Reason::Missing ? atom + " is missing" : atom + " is unexpectedly present";
}

std::string describe(const ModificationProposal& m) {
  std::ostringstream os;
  switch (m.kind) {
    case ModificationKind::AddEffectToEarlierStep:
      os << "add effect " << pddl::to_string(m.change) << " to " << m.target_operator;
      break;
    case ModificationKind::RemovePrecondition:
      os << "remove precondition " << pddl::to_string(m.change) << " from " << m.target_operator;
      break;
    case ModificationKind::RemoveOffendingDeleteEffect:
      os << "remove effect " << pddl::to_string(m.change) << " from " << m.target_operator;
      break;
  }
  if (m.source_step) os << " (step " << *m.source_step << ")";
  return os.str();
}

}  // namespace

RepairAdvice advise(const pddl::DomainAst& domain, const pddl::ProblemAst& problem,
                    const pddl::Plan& plan, const val::ValidationReport& report) {
  if (report.bind_failure) {
    throw Error(Errc::NoFlaw, "step " + std::to_string(report.bind_failure->step_index) +
                                  " could not be bound: " + report.bind_failure->message);
  }
  if (report.valid) throw Error(Errc::NoFlaw, "the plan is valid");

  RepairAdvice advice;
  std::size_t prefix = 0;
  if (report.flaw) {
    advice.flaw = report.flaw;
    advice.targets = report.flaw->unsatisfied;
    advice.insert_before = report.flaw->step_index;
    prefix = report.flaw->step_index - 1;
  } else {
    advice.targets = val::unsatisfied_goals(report.states.back(), problem.goal);
    advice.insert_before = plan.steps.size() + 1;
    prefix = plan.steps.size();
  }
  if (advice.targets.empty()) throw Error(Errc::NoFlaw, "nothing is unsatisfied");

  advice.option_a = make_achiever(domain, problem, advice.targets.front());

  auto& out = advice.option_b;
  for (const auto& target : advice.targets) {
    const bool positive = target.polarity == val::Polarity::Positive;

    if (advice.flaw) {
      const auto& step = advice.flaw->action;
      if (const auto* op = domain.find_action(step.action)) {
        const Binding b = bind_params(*op, step);
        for (const auto& pre : op->preconditions) {
          if (literal_matches(pre, b, target.atom, positive)) {
            out.push_back({ModificationKind::RemovePrecondition, op->name, op->params.size(), pre,
                           advice.flaw->step_index, target});
          }
        }
      }
    }

    for (std::size_t i = 1; i <= prefix; ++i) {
      const auto& step = plan.steps[i - 1];
      const auto* op = domain.find_action(step.action);
      if (op == nullptr) continue;
      if (auto lifted = lift(target.atom, *op, step)) {
        Literal change{positive, *lifted};
        if (std::find(op->effects.begin(), op->effects.end(), change) == op->effects.end()) {
          out.push_back({ModificationKind::AddEffectToEarlierStep, op->name, op->params.size(),
                         std::move(change), i, target});
        }
      }
      if (!advice.flaw || i > report.steps.size()) continue;
      const auto& ground_action = report.steps[i - 1].action;
      const bool offends = positive ? ground_action.del.contains(target.atom)
                                    : ground_action.add.contains(target.atom);
      if (!offends) continue;
      const Binding b = bind_params(*op, step);
      for (const auto& eff : op->effects) {
        if (literal_matches(eff, b, target.atom, !positive)) {
          out.push_back({ModificationKind::RemoveOffendingDeleteEffect, op->name,
                         op->params.size(), eff, i, target});
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.kind, a.source_step) < std::tie(b.kind, b.source_step);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const auto& a, const auto& b) {
                          return a.kind == b.kind && a.target_operator == b.target_operator &&
                                 a.change == b.change && a.source_step == b.source_step;
                        }),
            out.end());

  std::ostringstream text;
  if (advice.flaw) {
    text << "Step " << advice.flaw->step_index << " " << pddl::to_string(advice.flaw->action)
         << " is not applicable:";
  } else {
    text << "The plan runs but the goal is not reached:";
  }
  for (const auto& t : advice.targets) text << "\n  - " << describe(t);
  const auto& a = advice.option_a;
  text << "\nOption A: create action " << a.action.name << " whose only effect is "
       << pddl::to_string(a.action.effects.front()) << ", and run " << pddl::to_string(a.instance)
       << (advice.flaw ? " before step " + std::to_string(advice.insert_before) : " at the end");
  if (advice.targets.size() > 1) {
    text << " (one such action per unsatisfied literal)";
  }
  text << ".";
  if (out.empty()) {
    text << "\nOption B: no edit of an existing action applies.";
  } else {
    text << "\nOption B:";
    for (std::size_t i = 0; i < out.size(); ++i) text << "\n  " << i << ". " << describe(out[i]);
  }
  advice.advice_text = text.str();
  return advice;
}

RepairResult apply_advice(const pddl::DomainAst& domain, const RepairAdvice& advice,
                          const Choice& choice) {
  RepairResult result{domain, {}, std::nullopt};
  auto& d = result.domain;
  if (std::holds_alternative<ChooseA>(choice)) {
    pddl::OperatorSchema action = advice.option_a.action;
    const std::string base = action.name;
    for (int suffix = 2; d.find_action(action.name) != nullptr; ++suffix) {
      action.name = base + "-" + std::to_string(suffix);
    }
    result.achiever_name = action.name;
    d.actions.push_back(std::move(action));
  } else {
    const std::size_t index = std::get<ChooseB>(choice).index;
    if (index >= advice.option_b.size()) {
      throw Error(Errc::UnknownChoice, "option B has " + std::to_string(advice.option_b.size()) +
                                           " entries, index " + std::to_string(index) +
                                           " requested");
    }
    const auto& m = advice.option_b[index];
    auto it = std::find_if(d.actions.begin(), d.actions.end(),
                           [&](const auto& op) { return op.name == m.target_operator; });
    if (it == d.actions.end()) {
      throw Error(Errc::StaleAdvice, "operator '" + m.target_operator + "' no longer exists");
    }
    if (it->params.size() != m.target_arity) {
      throw Error(Errc::StaleAdvice, "operator '" + m.target_operator + "' changed arity");
    }
    auto remove = [&](std::vector<Literal>& lits, std::string_view what) {
      auto pos = std::find(lits.begin(), lits.end(), m.change);
      if (pos == lits.end()) {
        throw Error(Errc::StaleAdvice, pddl::to_string(m.change) + " is no longer a " +
                                           std::string(what) + " of " + m.target_operator);
      }
      lits.erase(pos);
    };
    switch (m.kind) {
      case ModificationKind::AddEffectToEarlierStep: {
        auto& effects = it->effects;
        if (std::find(effects.begin(), effects.end(), m.change) != effects.end()) break;
        // Adds go after the last add, deletes at the end.
        auto pos = effects.end();
        if (m.change.positive) {
          auto last_add = std::find_if(effects.rbegin(), effects.rend(),
                                       [](const Literal& l) { return l.positive; });
          pos = last_add.base();
        }
        effects.insert(pos, m.change);
        break;
      }
      case ModificationKind::RemovePrecondition:
        remove(it->preconditions, "precondition");
        break;
      case ModificationKind::RemoveOffendingDeleteEffect:
        remove(it->effects, "effect");
        break;
    }
  }
  result.diagnostics = ws::check_consistency(ws::project_from_pddl(d));
  return result;
}

pddl::Plan insert_achiever(const pddl::Plan& plan, const RepairAdvice& advice,
                           const std::string& achiever_name) {
  pddl::Plan out = plan;
  const std::size_t at = std::min(advice.insert_before == 0 ? 0 : advice.insert_before - 1,
                                  out.steps.size());
  out.steps.insert(out.steps.begin() + static_cast<std::ptrdiff_t>(at),
                   pddl::PlanStep{achiever_name, advice.option_a.instance.args});
  return out;
}

}  // namespace pddlwb::repair
