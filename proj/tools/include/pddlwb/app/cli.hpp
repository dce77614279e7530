// Command-line front end. `run_cli` is the whole program minus process
// plumbing, so tests can drive it with in-memory streams.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pddlwb::app {

/// Exit codes: 0 success, 1 domain-level failure (flaw, diagnostics, no
/// plan), 2 usage or I/O error. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pddlwb::app
