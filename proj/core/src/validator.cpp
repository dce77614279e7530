#include "pddlwb/validator.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace pddlwb::val {

std::string_view to_string(Polarity p) noexcept {
  return p == Polarity::Positive ? "positive" : "negative";
}

std::string_view to_string(Reason r) noexcept {
  return r == Reason::Missing ? "missing" : "unexpectedly-present";
}

WorldState initial_state(const pddl::ProblemAst& problem) {
  return {AtomSet(problem.init.begin(), problem.init.end())};
}

GroundAction bind_step(const pddl::DomainAst& domain, const pddl::ProblemAst& problem,
                       const pddl::PlanStep& step) {
  const pddl::OperatorSchema* op = domain.find_action(step.action);
  if (op == nullptr) {
    throw Error(Errc::UnknownAction, "no action named '" + step.action + "'");
  }
  if (op->params.size() != step.args.size()) {
    throw Error(Errc::ArityMismatch, "action " + step.action + " takes " +
                                         std::to_string(op->params.size()) + " arguments, got " +
                                         std::to_string(step.args.size()));
  }
  auto object_type = [&](const std::string& obj) -> const std::string* {
    for (const auto& o : problem.objects) {
      if (o.name == obj) return &o.type;
    }
    for (const auto& c : domain.constants) {
      if (c.name == obj) return &c.type;
    }
    return nullptr;
  };

  std::map<std::string, std::string> binding;
  for (std::size_t i = 0; i < op->params.size(); ++i) {
    const auto& param = op->params[i];
    const std::string& obj = step.args[i];
    const std::string* type = object_type(obj);
    if (type == nullptr) throw Error(Errc::UnknownObject, "unknown object '" + obj + "'");
    bool fits = false;
    try {
      fits = domain.types.is_subtype(*type, param.type);
    } catch (const Error&) {
      fits = false;
    }
    if (!fits) {
      throw Error(Errc::TypeMismatch, "argument " + std::to_string(i + 1) + " of " + step.action +
                                          ": " + obj + " is " + *type + ", parameter " +
                                          param.name + " needs " + param.type);
    }
    binding[param.name] = obj;
  }

  auto ground = [&](const pddl::Atom& lifted) {
    GroundAtom g{lifted.predicate, {}};
    for (const auto& term : lifted.args) {
      auto it = binding.find(term);
      g.args.push_back(it == binding.end() ? term : it->second);
    }
    return g;
  };

  GroundAction out{step.action, step.args, {}, {}, {}, {}};
  for (const auto& lit : op->preconditions) {
    (lit.positive ? out.pre_pos : out.pre_neg).insert(ground(lit.atom));
  }
  for (const auto& lit : op->effects) {
    (lit.positive ? out.add : out.del).insert(ground(lit.atom));
  }
  return out;
}

Applicability applicability(const WorldState& state, const GroundAction& action) {
  Applicability result;
  for (const auto& a : action.pre_pos) {
    if (!state.holds(a)) result.unsatisfied.push_back({a, Polarity::Positive, Reason::Missing});
  }
  for (const auto& a : action.pre_neg) {
    if (state.holds(a)) {
      result.unsatisfied.push_back({a, Polarity::Negative, Reason::UnexpectedlyPresent});
    }
  }
  result.applicable = result.unsatisfied.empty();
  return result;
}

WorldState progress(const WorldState& state, const GroundAction& action) {
  WorldState next = state;
  for (const auto& a : action.del) next.atoms.erase(a);
  next.atoms.insert(action.add.begin(), action.add.end());
  return next;
}

std::vector<Unsatisfied> unsatisfied_goals(const WorldState& state,
                                           const std::vector<pddl::Literal>& goal) {
  std::vector<Unsatisfied> out;
  for (const auto& lit : goal) {
    if (lit.positive && !state.holds(lit.atom)) {
      out.push_back({lit.atom, Polarity::Positive, Reason::Missing});
    } else if (!lit.positive && state.holds(lit.atom)) {
      out.push_back({lit.atom, Polarity::Negative, Reason::UnexpectedlyPresent});
    }
  }
  return out;
}

ValidationReport validate(const pddl::DomainAst& domain, const pddl::ProblemAst& problem,
                          const pddl::Plan& plan) {
  ValidationReport report;
  report.states.push_back(initial_state(problem));
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    GroundAction action;
    try {
      action = bind_step(domain, problem, step);
    } catch (const Error& e) {
      report.bind_failure = BindFailure{i + 1, step, e.code(), e.detail()};
      break;
    }
    auto check = applicability(report.states.back(), action);
    if (!check.applicable) {
      report.flaw = Flaw{i + 1, step, std::move(check.unsatisfied)};
      report.steps.push_back({std::move(action), false});
      break;
    }
    report.states.push_back(progress(report.states.back(), action));
    report.steps.push_back({std::move(action), true});
  }
  if (!report.flaw && !report.bind_failure) {
    report.goal_satisfied = unsatisfied_goals(report.states.back(), problem.goal).empty();
  }
  report.valid = !report.flaw && !report.bind_failure && report.goal_satisfied.value_or(false);
  report.links = causal_links(report);
  return report;
}

const WorldState& state_at(const ValidationReport& report, std::size_t k) {
  if (k >= report.states.size()) {
    throw Error(Errc::IndexBeyondFlaw, "state " + std::to_string(k) + " is past the applied prefix (" +
                                           std::to_string(report.applied_steps()) + " steps)");
  }
  return report.states[k];
}

std::vector<CausalLink> causal_links(const ValidationReport& report) {
  std::vector<CausalLink> links;
  const std::size_t applied = report.applied_steps();
  if (report.states.empty()) return links;
  const WorldState& init = report.states.front();
  for (std::size_t j = 1; j <= applied; ++j) {
    const GroundAction& consumer = report.steps[j - 1].action;
    for (const auto& p : consumer.pre_pos) {
      std::size_t producer = 0;
      for (std::size_t i = j - 1; i >= 1; --i) {
        if (report.steps[i - 1].action.add.contains(p)) {
          producer = i;
          break;
        }
      }
      if (producer != 0 || init.holds(p)) links.push_back({producer, j, p, Polarity::Positive});
    }
    for (const auto& p : consumer.pre_neg) {
      std::size_t producer = 0;
      for (std::size_t i = j - 1; i >= 1; --i) {
        const auto& a = report.steps[i - 1].action;
        if (a.del.contains(p) && !a.add.contains(p)) {
          producer = i;
          break;
        }
      }
      if (producer != 0 || !init.holds(p)) links.push_back({producer, j, p, Polarity::Negative});
    }
  }
  std::sort(links.begin(), links.end(), [](const CausalLink& a, const CausalLink& b) {
    return std::tie(a.consumer, a.atom, a.polarity) < std::tie(b.consumer, b.atom, b.polarity);
  });
  return links;
}

const GroundAction& step_overview(const ValidationReport& report, std::size_t j) {
  if (j < 1 || j > report.steps.size()) {
    throw Error(Errc::IndexOutOfRange, "step " + std::to_string(j) + " outside 1.." +
                                           std::to_string(report.steps.size()));
  }
  return report.steps[j - 1].action;
}

}  // namespace pddlwb::val
