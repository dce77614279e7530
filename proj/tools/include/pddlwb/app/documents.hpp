// JSON documents shared by the CLI and the HTTP service. Anything both faces
// can report is built here so the bytes match.
#pragma once

#include <optional>
#include <string>

#include "pddlwb/error.hpp"
#include "pddlwb/repair.hpp"
#include "pddlwb/serialize.hpp"
#include "pddlwb/workspace.hpp"

namespace pddlwb::app {

inline json::Json export_document(const ws::PddlExport& e) {
  return {{"domain", e.domain}, {"problem", e.problem ? json::Json(*e.problem) : json::Json(nullptr)}};
}

inline json::Json repair_document(const repair::RepairResult& r, const std::optional<pddl::Plan>& plan) {
  return {{"domain", pddl::print_domain(r.domain)},
          {"achiever", r.achiever_name ? json::Json(*r.achiever_name) : json::Json(nullptr)},
          {"plan", plan ? json::Json(pddl::print_plan(*plan)) : json::Json(nullptr)},
          {"diagnostics", json::to_json(r.diagnostics)}};
}

inline json::Json error_document(const Error& e) {
  json::Json err{{"code", std::string(to_string(e.code()))}, {"message", e.detail()}};
  if (e.where()) err["line"] = e.where()->line, err["column"] = e.where()->column;
  return {{"error", err}};
}

/// Project with its operators replaced by those of `domain`; language,
/// problems and KB are kept.
inline ws::Project with_operators(ws::Project project, const pddl::DomainAst& domain) {
  project.operators = domain.actions;
  return project;
}

}  // namespace pddlwb::app
