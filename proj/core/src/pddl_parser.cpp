#include <algorithm>
#include <cctype>
#include <set>

#include "pddlwb/pddl.hpp"
#include "pddlwb/sexpr.hpp"

namespace pddlwb::pddl {

using sexpr::Node;

namespace {

[[noreturn]] void fail(Errc code, const std::string& message, const Node& at) {
  throw Error(code, message, at.where);
}

const std::set<std::string, std::less<>> kUnsupportedSections = {
    ":functions", ":derived", ":durative-action", ":constraints",
    ":process", ":event", ":metric", ":timed-initial-literals"};

const std::set<std::string, std::less<>> kUnsupportedConnectives = {
    "or", "imply", "exists", "forall", "when", "=", "either",
    "increase", "decrease", "assign", "scale-up", "scale-down"};

bool is_keyword(const Node& n) {
  return n.is_symbol() && !n.symbol.empty() && n.symbol.front() == ':';
}

const std::string& expect_symbol(const Node& n, std::string_view what) {
  if (!n.is_symbol()) fail(Errc::MalformedSection, "expected " + std::string(what), n);
  return n.symbol;
}

/// Parses `a b - t c` style lists. `variables` selects whether names must
/// (true) or must not (false) start with `?`.
std::vector<TypedName> parse_typed_list(const std::vector<Node>& items,
                                        std::size_t first, bool variables,
                                        std::string_view what) {
  std::vector<TypedName> out;
  std::size_t pending_from = 0;
  for (std::size_t i = first; i < items.size(); ++i) {
    const Node& item = items[i];
    if (item.is_list) {
      if (item.head_is("either")) {
        fail(Errc::UnsupportedConstruct, "either types are not supported", item);
      }
      fail(Errc::MalformedSection, "unexpected list in " + std::string(what), item);
    }
    if (item.symbol == "-") {
      if (i + 1 >= items.size()) {
        fail(Errc::MalformedSection, "missing type after '-' in " + std::string(what), item);
      }
      const Node& type = items[i + 1];
      if (type.head_is("either")) {
        fail(Errc::UnsupportedConstruct, "either types are not supported", type);
      }
      const std::string& type_name = expect_symbol(type, "a type name");
      if (is_variable(type_name) || type_name == "-") {
        fail(Errc::MalformedSection, "bad type name '" + type_name + "'", type);
      }
      if (pending_from == out.size()) {
        fail(Errc::MalformedSection, "'-' without names in " + std::string(what), item);
      }
      for (std::size_t k = pending_from; k < out.size(); ++k) out[k].type = type_name;
      pending_from = out.size();
      ++i;
      continue;
    }
    if (is_variable(item.symbol) != variables) {
      fail(Errc::MalformedSection,
           (variables ? "expected a variable in " : "unexpected variable in ") +
               std::string(what) + ": '" + item.symbol + "'",
           item);
    }
    if (item.symbol.size() == 1 && variables) {
      fail(Errc::MalformedSection, "empty variable name", item);
    }
    out.push_back({item.symbol, std::string(kRootType)});
  }
  return out;
}

void check_unique(const std::vector<TypedName>& names, const Node& at,
                  std::string_view what) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n.name).second) {
      fail(Errc::MalformedSection, "duplicate " + std::string(what) + " '" + n.name + "'", at);
    }
  }
}

Atom parse_atom(const Node& n) {
  if (!n.is_list || n.children.empty()) {
    fail(Errc::MalformedSection, "expected an atom", n);
  }
  const Node& head = n.children.front();
  if (head.is_list) fail(Errc::MalformedSection, "predicate name expected", head);
  if (kUnsupportedConnectives.contains(head.symbol)) {
    fail(Errc::UnsupportedConstruct, "'" + head.symbol + "' is not supported", n);
  }
  if (head.symbol == "and" || head.symbol == "not" || is_keyword(head) ||
      is_variable(head.symbol)) {
    fail(Errc::MalformedSection, "bad predicate name '" + head.symbol + "'", head);
  }
  Atom atom{head.symbol, {}};
  for (std::size_t i = 1; i < n.children.size(); ++i) {
    const Node& arg = n.children[i];
    if (arg.is_list) {
      fail(Errc::UnsupportedConstruct, "nested terms are not supported", arg);
    }
    atom.args.push_back(arg.symbol);
  }
  return atom;
}

/// Conjunction of literals; `(and ...)` nests are flattened.
void parse_conjunction(const Node& n, std::vector<Literal>& out) {
  if (!n.is_list) fail(Errc::MalformedSection, "expected a formula", n);
  if (n.children.empty()) return;
  if (n.head_is("and")) {
    for (std::size_t i = 1; i < n.children.size(); ++i) {
      parse_conjunction(n.children[i], out);
    }
    return;
  }
  if (n.head_is("not")) {
    if (n.children.size() != 2) fail(Errc::MalformedSection, "not takes one atom", n);
    const Node& inner = n.children[1];
    if (inner.head_is("and") || inner.head_is("not")) {
      fail(Errc::UnsupportedConstruct, "not is only allowed around atoms", inner);
    }
    out.push_back({false, parse_atom(inner)});
    return;
  }
  out.push_back({true, parse_atom(n)});
}

RequirementSet parse_requirements(const Node& section) {
  RequirementSet reqs;
  for (std::size_t i = 1; i < section.children.size(); ++i) {
    const Node& flag = section.children[i];
    const std::string& key = expect_symbol(flag, "a requirement flag");
    if (key == ":strips") {
      reqs.add(Requirement::Strips);
    } else if (key == ":typing") {
      reqs.add(Requirement::Typing);
    } else if (key == ":negative-preconditions") {
      reqs.add(Requirement::NegativePreconditions);
    } else {
      fail(Errc::UnsupportedRequirement, "requirement '" + key + "' is not supported", flag);
    }
  }
  return reqs;
}

void parse_types(const Node& section, TypeHierarchy& types) {
  const auto entries = parse_typed_list(section.children, 1, false, ":types");
  std::map<std::string, std::string> explicit_parent;
  for (const auto& e : entries) {
    if (e.name == kRootType) continue;
    auto [it, fresh] = explicit_parent.emplace(e.name, e.type);
    if (!fresh && it->second != e.type) {
      fail(Errc::MalformedSection, "type '" + e.name + "' declared with two parents", section);
    }
  }
  // Parents that are never listed themselves hang off the root.
  for (const auto& [name, parent] : explicit_parent) {
    if (parent != kRootType && !explicit_parent.contains(parent)) {
      types.declare(parent, std::string(kRootType));
    }
    types.declare(name, parent);
  }
  for (const auto& [name, parent] : types.entries()) {
    std::string cursor = name;
    for (std::size_t steps = 0; cursor != kRootType; ++steps) {
      if (steps > types.entries().size()) {
        fail(Errc::MalformedSection, "type hierarchy cycle through '" + name + "'", section);
      }
      cursor = types.parent_of(cursor);
    }
  }
}

std::vector<PredicateDecl> parse_predicates(const Node& section) {
  std::vector<PredicateDecl> out;
  std::set<std::string> names;
  for (std::size_t i = 1; i < section.children.size(); ++i) {
    const Node& decl = section.children[i];
    if (!decl.is_list || decl.children.empty()) {
      fail(Errc::MalformedSection, "expected a predicate declaration", decl);
    }
    PredicateDecl p;
    p.name = expect_symbol(decl.children.front(), "a predicate name");
    if (is_variable(p.name) || is_keyword(decl.children.front())) {
      fail(Errc::MalformedSection, "bad predicate name '" + p.name + "'", decl);
    }
    p.params = parse_typed_list(decl.children, 1, true, "predicate " + p.name);
    check_unique(p.params, decl, "parameter");
    if (!names.insert(p.name).second) {
      fail(Errc::MalformedSection, "duplicate predicate '" + p.name + "'", decl);
    }
    out.push_back(std::move(p));
  }
  return out;
}

void check_bound(const OperatorSchema& op, const Node& at) {
  std::set<std::string> params;
  for (const auto& p : op.params) params.insert(p.name);
  auto check = [&](const std::vector<Literal>& lits, std::string_view where) {
    for (const auto& lit : lits) {
      for (const auto& arg : lit.atom.args) {
        if (is_variable(arg) && !params.contains(arg)) {
          fail(Errc::MalformedSection,
               "unbound variable " + arg + " in " + std::string(where) +
                   " of action '" + op.name + "'",
               at);
        }
      }
    }
  };
  check(op.preconditions, "precondition");
  check(op.effects, "effect");
}

OperatorSchema parse_action(const Node& section, const RequirementSet& reqs) {
  if (section.children.size() < 2) fail(Errc::MalformedSection, "action without a name", section);
  OperatorSchema op;
  op.name = expect_symbol(section.children[1], "an action name");
  if (is_keyword(section.children[1]) || is_variable(op.name)) {
    fail(Errc::MalformedSection, "bad action name '" + op.name + "'", section.children[1]);
  }
  std::set<std::string> seen_keys;
  for (std::size_t i = 2; i < section.children.size(); i += 2) {
    const Node& key = section.children[i];
    if (!is_keyword(key)) fail(Errc::MalformedSection, "expected an action key", key);
    if (i + 1 >= section.children.size()) {
      fail(Errc::MalformedSection, "missing value for " + key.symbol, key);
    }
    if (!seen_keys.insert(key.symbol).second) {
      fail(Errc::MalformedSection, "repeated " + key.symbol, key);
    }
    const Node& value = section.children[i + 1];
    if (key.symbol == ":parameters") {
      if (!value.is_list) fail(Errc::MalformedSection, "parameters must be a list", value);
      op.params = parse_typed_list(value.children, 0, true, "parameters of " + op.name);
      check_unique(op.params, value, "parameter");
    } else if (key.symbol == ":precondition") {
      parse_conjunction(value, op.preconditions);
    } else if (key.symbol == ":effect") {
      parse_conjunction(value, op.effects);
    } else if (key.symbol == ":duration" || key.symbol == ":condition") {
      fail(Errc::UnsupportedConstruct, key.symbol + " is not supported", key);
    } else {
      fail(Errc::MalformedSection, "unknown action key " + key.symbol, key);
    }
  }
  if (!reqs.has(Requirement::NegativePreconditions)) {
    for (const auto& lit : op.preconditions) {
      if (!lit.positive) {
        fail(Errc::UnsupportedConstruct,
             "negative precondition in '" + op.name +
                 "' requires :negative-preconditions",
             section);
      }
    }
  }
  check_bound(op, section);
  return op;
}

const Node& single_define(const std::vector<Node>& top, std::string_view text_kind) {
  if (top.empty()) {
    throw Error(Errc::MalformedSection, "empty " + std::string(text_kind) + " text", Location{});
  }
  if (top.size() != 1) {
    fail(Errc::MalformedSection, "trailing content after define", top[1]);
  }
  const Node& def = top.front();
  if (!def.head_is("define")) fail(Errc::MalformedSection, "expected (define ...)", def);
  if (def.children.size() < 2 || !def.children[1].head_is(text_kind) ||
      def.children[1].children.size() != 2 || !def.children[1].children[1].is_symbol()) {
    fail(Errc::MalformedSection, "expected (" + std::string(text_kind) + " <name>)", def);
  }
  return def;
}

void check_ground(const Atom& atom, const Node& at) {
  for (const auto& arg : atom.args) {
    if (is_variable(arg)) {
      fail(Errc::VariableInGroundContext,
           "variable " + arg + " in " + to_string(atom), at);
    }
  }
}

}  // namespace

DomainAst parse_domain(std::string_view text) {
  const auto top = sexpr::read_all(text);
  const Node& def = single_define(top, "domain");
  DomainAst d;
  d.name = def.children[1].children[1].symbol;
  std::set<std::string> seen_sections;
  std::set<std::string> action_names;
  for (std::size_t i = 2; i < def.children.size(); ++i) {
    const Node& section = def.children[i];
    if (!section.is_list || section.children.empty() || !is_keyword(section.children.front())) {
      fail(Errc::MalformedSection, "expected a domain section", section);
    }
    const std::string& key = section.children.front().symbol;
    if (kUnsupportedSections.contains(key)) {
      fail(Errc::UnsupportedConstruct, key + " is not supported", section);
    }
    if (key != ":action" && !seen_sections.insert(key).second) {
      fail(Errc::MalformedSection, "repeated section " + key, section);
    }
    if (key == ":requirements") {
      d.requirements = parse_requirements(section);
    } else if (key == ":types") {
      parse_types(section, d.types);
    } else if (key == ":constants") {
      d.constants = parse_typed_list(section.children, 1, false, ":constants");
      check_unique(d.constants, section, "constant");
    } else if (key == ":predicates") {
      d.predicates = parse_predicates(section);
    } else if (key == ":action") {
      auto op = parse_action(section, d.requirements);
      if (!action_names.insert(op.name).second) {
        fail(Errc::MalformedSection, "duplicate action '" + op.name + "'", section);
      }
      d.actions.push_back(std::move(op));
    } else {
      fail(Errc::MalformedSection, "unknown section " + key, section);
    }
  }
  return d;
}

ProblemAst parse_problem(std::string_view text) {
  const auto top = sexpr::read_all(text);
  const Node& def = single_define(top, "problem");
  ProblemAst p;
  p.name = def.children[1].children[1].symbol;
  std::set<std::string> seen_sections;
  for (std::size_t i = 2; i < def.children.size(); ++i) {
    const Node& section = def.children[i];
    if (!section.is_list || section.children.empty() || !is_keyword(section.children.front())) {
      fail(Errc::MalformedSection, "expected a problem section", section);
    }
    const std::string& key = section.children.front().symbol;
    if (kUnsupportedSections.contains(key)) {
      fail(Errc::UnsupportedConstruct, key + " is not supported", section);
    }
    if (!seen_sections.insert(key).second) {
      fail(Errc::MalformedSection, "repeated section " + key, section);
    }
    if (key == ":domain") {
      if (section.children.size() != 2) fail(Errc::MalformedSection, "(:domain <name>) expected", section);
      p.domain_name = expect_symbol(section.children[1], "a domain name");
    } else if (key == ":requirements") {
      parse_requirements(section);
    } else if (key == ":objects") {
      p.objects = parse_typed_list(section.children, 1, false, ":objects");
      check_unique(p.objects, section, "object");
    } else if (key == ":init") {
      for (std::size_t k = 1; k < section.children.size(); ++k) {
        const Node& fact = section.children[k];
        if (fact.head_is("not")) {
          fail(Errc::MalformedSection, "negative literal in :init", fact);
        }
        Atom atom = parse_atom(fact);
        check_ground(atom, fact);
        if (std::find(p.init.begin(), p.init.end(), atom) == p.init.end()) {
          p.init.push_back(std::move(atom));
        }
      }
    } else if (key == ":goal") {
      if (section.children.size() != 2) fail(Errc::MalformedSection, "(:goal <formula>) expected", section);
      parse_conjunction(section.children[1], p.goal);
      for (const auto& lit : p.goal) check_ground(lit.atom, section);
    } else {
      fail(Errc::MalformedSection, "unknown section " + key, section);
    }
  }
  return p;
}

namespace {

bool is_step_number(std::string_view s) {
  if (!s.empty() && s.back() == ':') s.remove_suffix(1);
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

}  // namespace

Plan parse_plan(std::string_view text) {
  Plan plan;
  for (const Node& node : sexpr::read_all(text)) {
    if (node.is_symbol()) {
      if (node.symbol == ":" || is_step_number(node.symbol)) continue;
      fail(Errc::MalformedSection, "unexpected '" + node.symbol + "' in plan", node);
    }
    if (node.children.empty()) fail(Errc::EmptyStep, "empty plan step", node);
    PlanStep step;
    for (const Node& part : node.children) {
      if (part.is_list) fail(Errc::MalformedSection, "nested list in plan step", part);
    }
    step.action = node.children.front().symbol;
    for (std::size_t i = 1; i < node.children.size(); ++i) {
      step.args.push_back(node.children[i].symbol);
    }
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

}  // namespace pddlwb::pddl
