#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pddlwb/pddl.hpp"

namespace testing {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(PDDLWB_FIXTURES_DIR) / name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline pddlwb::pddl::DomainAst d1() { return pddlwb::pddl::parse_domain(read_fixture("d1.pddl")); }
inline pddlwb::pddl::DomainAst d1b() { return pddlwb::pddl::parse_domain(read_fixture("d1b.pddl")); }
inline pddlwb::pddl::ProblemAst p1() { return pddlwb::pddl::parse_problem(read_fixture("p1.pddl")); }
inline pddlwb::pddl::Plan pl1() { return pddlwb::pddl::parse_plan(read_fixture("pl1.txt")); }

inline pddlwb::pddl::Atom atom(std::string pred, std::vector<std::string> args) {
  return {std::move(pred), std::move(args)};
}

}  // namespace testing
