// Reference replay used to cross-check the validator. It shares nothing with
// the validator beyond the parsed AST: atoms are plain strings, states are
// sorted string sets, and every step is re-grounded by textual substitution.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pddlwb/pddl.hpp"

namespace oracle {

struct Replay {
  bool valid = false;
  std::optional<std::size_t> flaw_step;  // 1-based
  std::set<std::string> missing;         // violated preconditions, "+atom" / "-atom"
  std::vector<std::set<std::string>> states;
  bool goal_reached = false;
};

inline std::string render(const std::string& pred, const std::vector<std::string>& args) {
  std::string s = "(" + pred;
  for (const auto& a : args) s += " " + a;
  return s + ")";
}

inline Replay replay(const pddlwb::pddl::DomainAst& d, const pddlwb::pddl::ProblemAst& p,
                     const pddlwb::pddl::Plan& plan) {
  Replay r;
  std::set<std::string> state;
  for (const auto& a : p.init) state.insert(render(a.predicate, a.args));
  r.states.push_back(state);

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    const pddlwb::pddl::OperatorSchema* op = nullptr;
    for (const auto& a : d.actions) {
      if (a.name == step.action) op = &a;
    }
    if (op == nullptr || op->params.size() != step.args.size()) return r;
    std::map<std::string, std::string> sigma;
    for (std::size_t k = 0; k < step.args.size(); ++k) sigma[op->params[k].name] = step.args[k];
    auto ground = [&](const pddlwb::pddl::Atom& a) {
      std::vector<std::string> args;
      for (const auto& t : a.args) args.push_back(sigma.count(t) ? sigma[t] : t);
      return render(a.predicate, args);
    };

    for (const auto& lit : op->preconditions) {
      const std::string g = ground(lit.atom);
      if (lit.positive != (state.count(g) > 0)) r.missing.insert((lit.positive ? "+" : "-") + g);
    }
    if (!r.missing.empty()) {
      r.flaw_step = i + 1;
      return r;
    }
    std::set<std::string> next = state;
    for (const auto& lit : op->effects) {
      if (!lit.positive) next.erase(ground(lit.atom));
    }
    for (const auto& lit : op->effects) {
      if (lit.positive) next.insert(ground(lit.atom));
    }
    state = next;
    r.states.push_back(state);
  }

  r.goal_reached = true;
  for (const auto& lit : p.goal) {
    const std::string g = render(lit.atom.predicate, lit.atom.args);
    if (lit.positive != (state.count(g) > 0)) r.goal_reached = false;
  }
  r.valid = r.goal_reached;
  return r;
}

}  // namespace oracle
