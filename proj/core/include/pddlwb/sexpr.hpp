// S-expression reader used by the PDDL and plan parsers.
//
// The reader lowercases every symbol and drops `;` comments, so callers only
// ever see normalized tokens. Each node remembers where it started for error
// reporting.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pddlwb/error.hpp"

namespace pddlwb::sexpr {

struct Node {
  bool is_list = false;
  std::string symbol;          // set when !is_list
  std::vector<Node> children;  // set when is_list
  Location where;

  bool is_symbol() const { return !is_list; }
  bool is_symbol(std::string_view s) const { return !is_list && symbol == s; }
  /// True for a list whose first child is the given symbol.
  bool head_is(std::string_view s) const {
    return is_list && !children.empty() && children.front().is_symbol(s);
  }
};

/// Reads every top-level expression in `text`. Top-level symbols are kept as
/// symbol nodes; callers decide whether they are legal.
/// Throws Error{UnbalancedParens} on a stray `)` or an unclosed `(`.
std::vector<Node> read_all(std::string_view text);

/// Lowercases ASCII letters; everything else passes through.
std::string lowercase(std::string_view s);

}  // namespace pddlwb::sexpr
