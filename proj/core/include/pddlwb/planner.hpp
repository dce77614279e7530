// Planner integration: external planners configured as plugins, and a
// built-in breadth-first planner.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pddlwb/pddl.hpp"

namespace pddlwb::planner {

enum class PlanSource { Stdout, File };

/// `command_template` is run through /bin/sh with {domain}, {problem} and
/// {plan_out} replaced by quoted paths.
struct PlannerPlugin {
  std::string name;
  std::string command_template;
  PlanSource plan_source = PlanSource::Stdout;
  double timeout_seconds = 60.0;

  friend bool operator==(const PlannerPlugin&, const PlannerPlugin&) = default;
};

/// JSON: a top-level list of {name, command, planSource: "stdout"|"file",
/// timeoutSeconds}. Empty text or `[]` yields no plugins.
/// Throws Error{ConfigError} naming the plugin and field.
std::vector<PlannerPlugin> load_plugins(std::string_view text);

const PlannerPlugin& find_plugin(const std::vector<PlannerPlugin>& plugins,
                                 std::string_view name);

/// Drops `;` comments, keeps the span from the first `(` to the last `)` of
/// every line that has one (so "0: (a b) [1]" works), and parses the rest as
/// a plan. Throws Error{NoPlanInOutput} when
/// no such line exists.
pddl::Plan extract_plan(std::string_view planner_output);

/// Runs the plugin in a private temporary directory holding domain.pddl,
/// problem.pddl and (for file output) plan.txt.
/// Throws Error{SpawnError | TimeoutError | NoPlanInOutput} or parse errors.
pddl::Plan invoke_planner(const PlannerPlugin& plugin, std::string_view domain_text,
                          std::string_view problem_text);

struct SearchLimits {
  std::size_t max_states = 100000;
  std::size_t max_plan_length = 64;
};

/// Every type-respecting instantiation of every action, sorted by
/// (action name, args).
std::vector<pddl::PlanStep> ground_steps(const pddl::DomainAst& domain,
                                         const pddl::ProblemAst& problem);

/// Shortest plan by breadth-first search; among shortest plans, the
/// lexicographically first sequence of (action name, args).
/// Throws Error{NoPlanFound} or Error{LimitExceeded}.
pddl::Plan bfs_plan(const pddl::DomainAst& domain, const pddl::ProblemAst& problem,
                    const SearchLimits& limits = {});

}  // namespace pddlwb::planner
