#include <algorithm>
#include <deque>
#include <map>
#include <unordered_set>

#include "pddlwb/planner.hpp"
#include "pddlwb/validator.hpp"

namespace pddlwb::planner {

std::vector<pddl::PlanStep> ground_steps(const pddl::DomainAst& domain,
                                         const pddl::ProblemAst& problem) {
  std::vector<pddl::TypedName> universe = problem.objects;
  universe.insert(universe.end(), domain.constants.begin(), domain.constants.end());

  auto candidates_for = [&](const std::string& type) {
    std::vector<std::string> out;
    for (const auto& o : universe) {
      bool fits = false;
      try {
        fits = domain.types.is_subtype(o.type, type);
      } catch (const Error&) {
      }
      if (fits) out.push_back(o.name);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  std::vector<pddl::PlanStep> steps;
  for (const auto& op : domain.actions) {
    std::vector<std::vector<std::string>> choices;
    bool empty = false;
    for (const auto& param : op.params) {
      choices.push_back(candidates_for(param.type));
      empty = empty || choices.back().empty();
    }
    if (empty) continue;
    // Odometer over the parameter choices, last parameter fastest.
    std::vector<std::size_t> idx(choices.size(), 0);
    for (bool more = true; more;) {
      pddl::PlanStep step{op.name, {}};
      for (std::size_t i = 0; i < choices.size(); ++i) step.args.push_back(choices[i][idx[i]]);
      steps.push_back(std::move(step));
      more = false;
      for (std::size_t k = choices.size(); k-- > 0;) {
        if (++idx[k] < choices[k].size()) {
          more = true;
          break;
        }
        idx[k] = 0;
      }
    }
  }
  std::sort(steps.begin(), steps.end());
  return steps;
}

namespace {

using AtomId = std::uint32_t;
using PackedState = std::vector<AtomId>;

struct PackedHash {
  std::size_t operator()(const PackedState& s) const noexcept {
    std::size_t h = s.size();
    for (AtomId a : s) h ^= a + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

struct PackedAction {
  PackedState pre_pos, pre_neg, add, del;
};

class AtomTable {
 public:
  AtomId id(const pddl::Atom& a) {
    auto [it, fresh] = ids_.emplace(a, static_cast<AtomId>(ids_.size()));
    return it->second;
  }
  PackedState pack(const val::AtomSet& atoms) {
    PackedState s;
    for (const auto& a : atoms) s.push_back(id(a));
    std::sort(s.begin(), s.end());
    return s;
  }

 private:
  std::map<pddl::Atom, AtomId> ids_;
};

bool contains(const PackedState& s, AtomId a) { return std::binary_search(s.begin(), s.end(), a); }

bool applicable(const PackedState& s, const PackedAction& a) {
  return std::all_of(a.pre_pos.begin(), a.pre_pos.end(), [&](AtomId x) { return contains(s, x); }) &&
         std::none_of(a.pre_neg.begin(), a.pre_neg.end(), [&](AtomId x) { return contains(s, x); });
}

PackedState successor(const PackedState& s, const PackedAction& a) {
  PackedState kept;
  std::set_difference(s.begin(), s.end(), a.del.begin(), a.del.end(), std::back_inserter(kept));
  PackedState next;
  std::set_union(kept.begin(), kept.end(), a.add.begin(), a.add.end(), std::back_inserter(next));
  return next;
}

}  // namespace

pddl::Plan bfs_plan(const pddl::DomainAst& domain, const pddl::ProblemAst& problem,
                    const SearchLimits& limits) {
  if (limits.max_states == 0 || limits.max_plan_length == 0) {
    throw Error(Errc::LimitExceeded, "search limits must be positive");
  }
  AtomTable table;
  const auto steps = ground_steps(domain, problem);
  std::vector<PackedAction> actions;
  actions.reserve(steps.size());
  for (const auto& step : steps) {
    const auto g = val::bind_step(domain, problem, step);
    actions.push_back({table.pack(g.pre_pos), table.pack(g.pre_neg), table.pack(g.add),
                       table.pack(g.del)});
  }
  PackedState goal_pos;
  PackedState goal_neg;
  for (const auto& lit : problem.goal) (lit.positive ? goal_pos : goal_neg).push_back(table.id(lit.atom));
  std::sort(goal_pos.begin(), goal_pos.end());
  std::sort(goal_neg.begin(), goal_neg.end());
  const PackedAction goal_test{goal_pos, goal_neg, {}, {}};

  struct Node {
    PackedState state;
    std::size_t parent;
    std::size_t action;
    std::size_t depth;
  };
  std::vector<Node> nodes;
  std::unordered_set<PackedState, PackedHash> seen;

  auto extract = [&](std::size_t node) {
    pddl::Plan plan;
    for (std::size_t n = node; n != 0; n = nodes[n].parent) plan.steps.push_back(steps[nodes[n].action]);
    std::reverse(plan.steps.begin(), plan.steps.end());
    return plan;
  };

  nodes.push_back({table.pack(val::initial_state(problem).atoms), 0, 0, 0});
  seen.insert(nodes.front().state);
  if (applicable(nodes.front().state, goal_test)) return {};

  std::deque<std::size_t> frontier{0};
  bool truncated = false;
  while (!frontier.empty()) {
    const std::size_t current = frontier.front();
    frontier.pop_front();
    const std::size_t depth = nodes[current].depth;
    for (std::size_t a = 0; a < actions.size(); ++a) {
      if (!applicable(nodes[current].state, actions[a])) continue;
      PackedState next = successor(nodes[current].state, actions[a]);
      if (seen.contains(next)) continue;
      if (depth + 1 > limits.max_plan_length) {
        truncated = true;
        break;
      }
      if (seen.size() >= limits.max_states) {
        throw Error(Errc::LimitExceeded,
                    "more than " + std::to_string(limits.max_states) + " states visited");
      }
      seen.insert(next);
      nodes.push_back({std::move(next), current, a, depth + 1});
      if (applicable(nodes.back().state, goal_test)) return extract(nodes.size() - 1);
      frontier.push_back(nodes.size() - 1);
    }
  }
  if (truncated) {
    throw Error(Errc::LimitExceeded,
                "no plan within " + std::to_string(limits.max_plan_length) + " steps");
  }
  throw Error(Errc::NoPlanFound, "the goal is unreachable from the initial state");
}

}  // namespace pddlwb::planner
