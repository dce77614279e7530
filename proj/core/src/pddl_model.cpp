#include <algorithm>
#include <sstream>

#include "pddlwb/pddl.hpp"

namespace pddlwb::pddl {

std::string_view to_string(Requirement r) noexcept {
  switch (r) {
    case Requirement::Strips: return ":strips";
    case Requirement::Typing: return ":typing";
    case Requirement::NegativePreconditions: return ":negative-preconditions";
  }
  return "";
}

bool RequirementSet::has(Requirement r) const {
  return std::find(flags.begin(), flags.end(), r) != flags.end();
}

void RequirementSet::add(Requirement r) {
  if (!has(r)) flags.push_back(r);
}

void TypeHierarchy::declare(const std::string& name, const std::string& parent) {
  if (name == kRootType) return;
  parents_[name] = parent;
}

bool TypeHierarchy::contains(std::string_view name) const {
  return name == kRootType || parents_.find(std::string(name)) != parents_.end();
}

const std::string& TypeHierarchy::parent_of(const std::string& name) const {
  static const std::string root(kRootType);
  auto it = parents_.find(name);
  return it == parents_.end() ? root : it->second;
}

bool TypeHierarchy::is_subtype(const std::string& sub, const std::string& sup) const {
  if (!contains(sub)) throw Error(Errc::UnknownType, "unknown type '" + sub + "'");
  if (!contains(sup)) throw Error(Errc::UnknownType, "unknown type '" + sup + "'");
  std::string cursor = sub;
  // Bounded walk so a malformed (cyclic) map cannot loop forever.
  for (std::size_t steps = 0; steps <= parents_.size() + 1; ++steps) {
    if (cursor == sup) return true;
    if (cursor == kRootType) return false;
    cursor = parent_of(cursor);
  }
  return false;
}

std::vector<std::string> TypeHierarchy::topological() const {
  std::vector<std::string> order;
  std::vector<std::string> frontier{std::string(kRootType)};
  while (!frontier.empty()) {
    std::vector<std::string> next;
    for (const auto& parent : frontier) {
      for (const auto& [name, p] : parents_) {
        if (p == parent) {
          order.push_back(name);
          next.push_back(name);
        }
      }
    }
    frontier = std::move(next);
  }
  return order;
}

std::string to_string(const Atom& atom) {
  std::string out = "(" + atom.predicate;
  for (const auto& a : atom.args) out += " " + a;
  return out + ")";
}

std::string to_string(const Literal& literal) {
  return literal.positive ? to_string(literal.atom) : "(not " + to_string(literal.atom) + ")";
}

std::string to_string(const PlanStep& step) {
  std::string out = "(" + step.action;
  for (const auto& a : step.args) out += " " + a;
  return out + ")";
}

const OperatorSchema* DomainAst::find_action(std::string_view action) const {
  auto it = std::find_if(actions.begin(), actions.end(),
                         [&](const OperatorSchema& op) { return op.name == action; });
  return it == actions.end() ? nullptr : &*it;
}

const PredicateDecl* DomainAst::find_predicate(std::string_view predicate) const {
  auto it = std::find_if(predicates.begin(), predicates.end(),
                         [&](const PredicateDecl& p) { return p.name == predicate; });
  return it == predicates.end() ? nullptr : &*it;
}

namespace {

/// `a b - t c - u`, grouping runs of equal type. A trailing root-typed run
/// prints bare; earlier ones must be explicit or they would absorb the next
/// run's type.
std::string typed_list(const std::vector<TypedName>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += items[i].name;
    const bool run_ends = i + 1 == items.size() || items[i + 1].type != items[i].type;
    if (run_ends && (items[i].type != kRootType || i + 1 < items.size())) {
      out += " - " + items[i].type;
    }
  }
  return out;
}

std::string conjunction(const std::vector<Literal>& lits) {
  std::string out = "(and";
  for (const auto& l : lits) out += " " + to_string(l);
  return out + ")";
}

}  // namespace

std::string to_string(const PredicateDecl& decl) {
  std::string out = "(" + decl.name;
  if (!decl.params.empty()) out += " " + typed_list(decl.params);
  return out + ")";
}

std::string print_domain(const DomainAst& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  if (!d.requirements.flags.empty()) {
    os << "  (:requirements";
    for (auto r : d.requirements.flags) os << ' ' << to_string(r);
    os << ")\n";
  }
  if (!d.types.empty()) {
    os << "  (:types";
    // One line per parent, parents in hierarchy order.
    std::vector<std::string> parents{std::string(kRootType)};
    for (const auto& t : d.types.topological()) parents.push_back(t);
    for (const auto& parent : parents) {
      std::vector<std::string> children;
      for (const auto& [name, p] : d.types.entries()) {
        if (p == parent) children.push_back(name);
      }
      if (children.empty()) continue;
      os << "\n   ";
      for (const auto& c : children) os << ' ' << c;
      os << " - " << parent;
    }
    os << ")\n";
  }
  if (!d.constants.empty()) {
    os << "  (:constants " << typed_list(d.constants) << ")\n";
  }
  if (!d.predicates.empty()) {
    os << "  (:predicates";
    for (const auto& p : d.predicates) os << "\n    " << to_string(p);
    os << ")\n";
  }
  for (const auto& op : d.actions) {
    os << "  (:action " << op.name << "\n";
    os << "    :parameters (" << typed_list(op.params) << ")\n";
    os << "    :precondition " << conjunction(op.preconditions) << "\n";
    os << "    :effect " << conjunction(op.effects) << ")\n";
  }
  os << ")\n";
  return os.str();
}

std::string print_problem(const ProblemAst& p) {
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n";
  if (!p.domain_name.empty()) os << "  (:domain " << p.domain_name << ")\n";
  if (!p.objects.empty()) os << "  (:objects " << typed_list(p.objects) << ")\n";
  os << "  (:init";
  for (const auto& a : p.init) os << "\n    " << to_string(a);
  os << ")\n";
  os << "  (:goal " << conjunction(p.goal) << "))\n";
  return os.str();
}

std::string print_plan(const Plan& plan) {
  std::string out;
  for (const auto& s : plan.steps) out += to_string(s) + "\n";
  return out;
}

}  // namespace pddlwb::pddl
