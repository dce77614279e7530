// JSON documents exchanged by the CLI (`--format json`) and the HTTP service.
// Both faces go through these functions, so equal inputs give byte-identical
// output.

#pragma once

#include <nlohmann/json.hpp>

#include "pddlwb/knowledge_base.hpp"
#include "pddlwb/repair.hpp"
#include "pddlwb/validator.hpp"
#include "pddlwb/workspace.hpp"

namespace pddlwb::json {

using Json = nlohmann::ordered_json;

/// Pretty-printed with two-space indentation and a trailing newline.
std::string dump(const Json& j);

Json to_json(const pddl::Literal& lit);
Json to_json(const pddl::PlanStep& step);
Json to_json(const pddl::Plan& plan);
Json to_json(const pddl::OperatorSchema& op);
Json to_json(const pddl::ProblemAst& problem);
Json to_json(const val::WorldState& state);
Json to_json(const val::GroundAction& action);
Json to_json(const val::Unsatisfied& u);
Json to_json(const val::Flaw& flaw);
Json to_json(const val::CausalLink& link);
Json to_json(const std::vector<val::CausalLink>& links);
/// Fields: states, steps, flaw, goalSatisfied, valid, links (+ bindFailure).
Json to_json(const val::ValidationReport& report);
Json to_json(const repair::RepairAdvice& advice);
Json to_json(const ws::Diagnostic& d);
Json to_json(const std::vector<ws::Diagnostic>& diagnostics);
Json to_json(const kb::Template& t);
Json to_json(const ws::Project& project);

/// Inverse readers; throw Error{SchemaViolation} on malformed documents.
pddl::Literal literal_from_json(const Json& j);
pddl::OperatorSchema operator_from_json(const Json& j);
pddl::ProblemAst problem_from_json(const Json& j);
pddl::Plan plan_from_json(const Json& j);
ws::Project project_from_json(const Json& j);
/// {"kind": "DeclareClass", ...}; field names follow the edit structs.
ws::Edit edit_from_json(const Json& j);
/// {"option": "A"} or {"option": "B", "index": k}.
repair::Choice choice_from_json(const Json& j);

}  // namespace pddlwb::json
