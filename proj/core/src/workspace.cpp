#include "pddlwb/workspace.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace pddlwb::ws {

using pddl::Atom;
using pddl::Literal;
using pddl::TypedName;

std::string_view to_string(Level level) noexcept {
  switch (level) {
    case Level::Language: return "language";
    case Level::Operators: return "operator";
    case Level::Problems: return "problem";
  }
  return "";
}

std::string_view to_string(Severity severity) noexcept {
  return severity == Severity::Error ? "error" : "warning";
}

std::string_view to_string(DiagCode code) noexcept {
  switch (code) {
    case DiagCode::UnknownType: return "UnknownType";
    case DiagCode::UnknownPredicate: return "UnknownPredicate";
    case DiagCode::ArityMismatch: return "ArityMismatch";
    case DiagCode::ArgTypeMismatch: return "ArgTypeMismatch";
    case DiagCode::UnboundVariable: return "UnboundVariable";
    case DiagCode::DuplicateDeclaration: return "DuplicateDeclaration";
    case DiagCode::DanglingReference: return "DanglingReference";
    case DiagCode::HierarchyCycle: return "HierarchyCycle";
    case DiagCode::UnknownObject: return "UnknownObject";
    case DiagCode::ContradictoryEffect: return "ContradictoryEffect";
  }
  return "";
}

std::string to_string(const Diagnostic& d) {
  return std::string(to_string(d.severity)) + " " + std::string(to_string(d.code)) + " [" +
         std::string(to_string(d.locus.level)) + " " + d.locus.owner + "] " + d.locus.detail;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string_view to_string(SymbolKind kind) noexcept {
  switch (kind) {
    case SymbolKind::Class: return "class";
    case SymbolKind::Predicate: return "predicate";
    case SymbolKind::Operator: return "operator";
    case SymbolKind::Problem: return "problem";
  }
  return "";
}

std::optional<SymbolKind> symbol_kind_from_string(std::string_view s) {
  if (s == "class") return SymbolKind::Class;
  if (s == "predicate") return SymbolKind::Predicate;
  if (s == "operator") return SymbolKind::Operator;
  if (s == "problem") return SymbolKind::Problem;
  return std::nullopt;
}

const pddl::ProblemAst* Project::find_problem(std::string_view problem) const {
  auto it = std::find_if(problems.begin(), problems.end(),
                         [&](const pddl::ProblemAst& p) { return p.name == problem; });
  return it == problems.end() ? nullptr : &*it;
}

Project new_project(std::string name) {
  Project p;
  p.name = std::move(name);
  return p;
}

// ---------------------------------------------------------------------------
// Consistency

namespace {

class Checker {
 public:
  explicit Checker(const Project& p) : p_(p) {
    for (const auto& c : p.language.classes) parents_.emplace(c.name, c.parent);
    for (const auto& pred : p.language.predicates) predicates_.emplace(pred.name, &pred);
    for (const auto& c : p.language.constants) constants_.emplace(c.name, c.type);
    for (const auto& r : p.language.retired) retired_.emplace(r.kind, r.name);
  }

  std::vector<Diagnostic> run() {
    check_language();
    for (std::size_t i = 0; i < p_.operators.size(); ++i) check_operator(i);
    for (std::size_t i = 0; i < p_.problems.size(); ++i) check_problem(i);
    std::stable_sort(out_.begin(), out_.end(), [](const Diagnostic& a, const Diagnostic& b) {
      return std::tie(a.locus.level, a.locus.owner, a.code, a.locus.detail) <
             std::tie(b.locus.level, b.locus.owner, b.code, b.locus.detail);
    });
    return std::move(out_);
  }

 private:
  void add(DiagCode code, Level level, const std::string& owner, std::string detail,
           Severity severity = Severity::Error) {
    out_.push_back({severity, code, {level, owner, std::move(detail)}});
  }

  bool known_type(const std::string& t) const {
    return t == pddl::kRootType || parents_.contains(t);
  }

  bool is_retired(SymbolKind kind, const std::string& name) const {
    return retired_.contains({kind, name});
  }

  /// Reports an unresolved type reference; returns whether it resolved.
  bool check_type_ref(const std::string& type, Level level, const std::string& owner,
                      const std::string& context) {
    if (known_type(type)) return true;
    if (is_retired(SymbolKind::Class, type)) {
      add(DiagCode::DanglingReference, level, owner,
          context + " refers to removed class '" + type + "'");
    } else {
      add(DiagCode::UnknownType, level, owner, context + " uses unknown type '" + type + "'");
    }
    return false;
  }

  /// nullopt when the answer is unknowable (unknown type or a cycle).
  std::optional<bool> is_subtype(const std::string& sub, const std::string& sup) const {
    if (!known_type(sub) || !known_type(sup)) return std::nullopt;
    std::string cursor = sub;
    for (std::size_t steps = 0; steps <= parents_.size() + 1; ++steps) {
      if (cursor == sup) return true;
      if (cursor == pddl::kRootType) return false;
      auto it = parents_.find(cursor);
      if (it == parents_.end()) return std::nullopt;
      cursor = it->second;
    }
    return std::nullopt;
  }

  void check_language() {
    std::map<std::string, int> class_count;
    for (const auto& c : p_.language.classes) {
      if (c.name == pddl::kRootType) {
        add(DiagCode::DuplicateDeclaration, Level::Language, c.name,
            "class 'object' is the implicit root");
        continue;
      }
      if (++class_count[c.name] > 1) {
        add(DiagCode::DuplicateDeclaration, Level::Language, c.name,
            "class '" + c.name + "' declared more than once");
      }
      check_type_ref(c.parent, Level::Language, c.name, "class " + c.name);
    }
    std::set<std::string> cyclic_reported;
    for (const auto& c : p_.language.classes) {
      if (c.name == pddl::kRootType || cyclic_reported.contains(c.name)) continue;
      // Walk up; a revisit of the start means the class sits on a cycle.
      std::string cursor = c.parent;
      for (std::size_t steps = 0; steps <= parents_.size(); ++steps) {
        if (cursor == c.name) {
          cyclic_reported.insert(c.name);
          add(DiagCode::HierarchyCycle, Level::Language, c.name,
              "class '" + c.name + "' is its own ancestor");
          break;
        }
        auto it = parents_.find(cursor);
        if (it == parents_.end()) break;
        cursor = it->second;
      }
    }

    std::set<std::string> pred_names;
    for (const auto& pred : p_.language.predicates) {
      const std::string owner = pred.name;
      if (!pred_names.insert(pred.name).second) {
        add(DiagCode::DuplicateDeclaration, Level::Language, owner,
            "predicate '" + pred.name + "' declared more than once");
      }
      std::set<std::string> vars;
      for (const auto& param : pred.params) {
        if (!vars.insert(param.name).second) {
          add(DiagCode::DuplicateDeclaration, Level::Language, owner,
              "parameter " + param.name + " repeated");
        }
        check_type_ref(param.type, Level::Language, owner,
                       "parameter " + param.name + " of predicate " + pred.name);
      }
    }

    std::set<std::string> const_names;
    for (const auto& c : p_.language.constants) {
      if (!const_names.insert(c.name).second) {
        add(DiagCode::DuplicateDeclaration, Level::Language, c.name,
            "constant '" + c.name + "' declared more than once");
      }
      check_type_ref(c.type, Level::Language, c.name, "constant " + c.name);
    }
  }

  /// Shared literal check. `term_type` resolves a term to its type, or
  /// reports the term and returns nullopt.
  template <typename TermType>
  void check_atom(const Atom& atom, Level level, const std::string& owner,
                  const std::string& context, TermType&& term_type) {
    const std::string where = context + " " + pddl::to_string(atom);
    auto it = predicates_.find(atom.predicate);
    const pddl::PredicateDecl* decl = it == predicates_.end() ? nullptr : it->second;
    std::vector<std::optional<std::string>> arg_types;
    for (const auto& arg : atom.args) arg_types.push_back(term_type(arg, where));
    if (decl == nullptr) {
      if (is_retired(SymbolKind::Predicate, atom.predicate)) {
        add(DiagCode::DanglingReference, level, owner,
            where + ": predicate '" + atom.predicate + "' was removed");
      } else {
        add(DiagCode::UnknownPredicate, level, owner,
            where + ": predicate '" + atom.predicate + "' is not declared");
      }
      return;
    }
    if (decl->arity() != atom.args.size()) {
      add(DiagCode::ArityMismatch, level, owner,
          where + ": predicate " + atom.predicate + " expects " +
              std::to_string(decl->arity()) + " arguments, got " +
              std::to_string(atom.args.size()));
      return;
    }
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
      if (!arg_types[i]) continue;
      const std::string& expected = decl->params[i].type;
      if (is_subtype(*arg_types[i], expected) == false) {
        add(DiagCode::ArgTypeMismatch, level, owner,
            where + ": argument " + std::to_string(i + 1) + " (" + atom.args[i] + ") is " +
                *arg_types[i] + ", expected " + expected);
      }
    }
  }

  void check_operator(std::size_t index) {
    const auto& op = p_.operators[index];
    const std::string& owner = op.name;
    for (std::size_t j = 0; j < index; ++j) {
      if (p_.operators[j].name == op.name) {
        add(DiagCode::DuplicateDeclaration, Level::Operators, owner,
            "operator '" + op.name + "' declared more than once");
        break;
      }
    }
    std::map<std::string, std::string> param_types;
    for (const auto& param : op.params) {
      if (!param_types.emplace(param.name, param.type).second) {
        add(DiagCode::DuplicateDeclaration, Level::Operators, owner,
            "parameter " + param.name + " repeated");
      }
      check_type_ref(param.type, Level::Operators, owner, "parameter " + param.name);
    }
    auto term_type = [&](const std::string& term,
                         const std::string& where) -> std::optional<std::string> {
      if (pddl::is_variable(term)) {
        auto it = param_types.find(term);
        if (it == param_types.end()) {
          add(DiagCode::UnboundVariable, Level::Operators, owner,
              where + ": variable " + term + " is not a parameter");
          return std::nullopt;
        }
        return it->second;
      }
      auto it = constants_.find(term);
      if (it == constants_.end()) {
        add(DiagCode::UnknownObject, Level::Operators, owner,
            where + ": constant '" + term + "' is not declared");
        return std::nullopt;
      }
      return it->second;
    };
    for (const auto& lit : op.preconditions) {
      check_atom(lit.atom, Level::Operators, owner,
                 lit.positive ? "precondition" : "negative precondition", term_type);
    }
    for (const auto& lit : op.effects) {
      check_atom(lit.atom, Level::Operators, owner,
                 lit.positive ? "add effect" : "delete effect", term_type);
    }
    for (const auto& add_lit : op.effects) {
      if (!add_lit.positive) continue;
      for (const auto& del_lit : op.effects) {
        if (!del_lit.positive && del_lit.atom == add_lit.atom) {
          add(DiagCode::ContradictoryEffect, Level::Operators, owner,
              pddl::to_string(add_lit.atom) + " is both added and deleted", Severity::Warning);
          break;
        }
      }
    }
  }

  void check_problem(std::size_t index) {
    const auto& prob = p_.problems[index];
    const std::string& owner = prob.name;
    for (std::size_t j = 0; j < index; ++j) {
      if (p_.problems[j].name == prob.name) {
        add(DiagCode::DuplicateDeclaration, Level::Problems, owner,
            "problem '" + prob.name + "' declared more than once");
        break;
      }
    }
    std::map<std::string, std::string> object_types = constants_;
    std::set<std::string> seen;
    for (const auto& obj : prob.objects) {
      if (!seen.insert(obj.name).second) {
        add(DiagCode::DuplicateDeclaration, Level::Problems, owner,
            "object " + obj.name + " repeated");
      }
      object_types[obj.name] = obj.type;
      check_type_ref(obj.type, Level::Problems, owner, "object " + obj.name);
    }
    auto term_type = [&](const std::string& term,
                         const std::string& where) -> std::optional<std::string> {
      auto it = object_types.find(term);
      if (it == object_types.end()) {
        add(DiagCode::UnknownObject, Level::Problems, owner,
            where + ": object '" + term + "' is not declared");
        return std::nullopt;
      }
      return it->second;
    };
    for (const auto& atom : prob.init) {
      check_atom(atom, Level::Problems, owner, "init", term_type);
    }
    for (const auto& lit : prob.goal) {
      check_atom(lit.atom, Level::Problems, owner, lit.positive ? "goal" : "negative goal",
                 term_type);
    }
  }

  const Project& p_;
  std::map<std::string, std::string> parents_;
  std::map<std::string, const pddl::PredicateDecl*> predicates_;
  std::map<std::string, std::string> constants_;
  std::set<std::pair<SymbolKind, std::string>> retired_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> check_consistency(const Project& project) {
  return Checker(project).run();
}

// ---------------------------------------------------------------------------
// Edits

namespace {

[[noreturn]] void unknown_target(SymbolKind kind, const std::string& name) {
  throw Error(Errc::UnknownTarget,
              std::string(to_string(kind)) + " '" + name + "' does not exist");
}

void retire(Language& lang, SymbolKind kind, const std::string& name) {
  RetiredSymbol r{kind, name};
  if (std::find(lang.retired.begin(), lang.retired.end(), r) == lang.retired.end()) {
    lang.retired.push_back(std::move(r));
  }
}

void unretire(Language& lang, SymbolKind kind, const std::string& name) {
  std::erase(lang.retired, RetiredSymbol{kind, name});
}

void rename_term_list(std::vector<TypedName>& items, const std::string& from,
                      const std::string& to) {
  for (auto& t : items) {
    if (t.type == from) t.type = to;
  }
}

void rename_predicate_in(std::vector<Literal>& lits, const std::string& from,
                         const std::string& to) {
  for (auto& l : lits) {
    if (l.atom.predicate == from) l.atom.predicate = to;
  }
}

void rename(Project& p, const edit::RenameSymbol& e) {
  const auto& from = e.old_name;
  const auto& to = e.new_name;
  switch (e.kind) {
    case SymbolKind::Class: {
      const bool exists = std::any_of(p.language.classes.begin(), p.language.classes.end(),
                                      [&](const kb::TypeDecl& c) { return c.name == from; });
      if (!exists) unknown_target(e.kind, from);
      for (auto& c : p.language.classes) {
        if (c.name == from) c.name = to;
        if (c.parent == from) c.parent = to;
      }
      for (auto& pred : p.language.predicates) rename_term_list(pred.params, from, to);
      rename_term_list(p.language.constants, from, to);
      for (auto& op : p.operators) rename_term_list(op.params, from, to);
      for (auto& prob : p.problems) rename_term_list(prob.objects, from, to);
      break;
    }
    case SymbolKind::Predicate: {
      bool exists = false;
      for (auto& pred : p.language.predicates) {
        if (pred.name == from) {
          pred.name = to;
          exists = true;
        }
      }
      if (!exists) unknown_target(e.kind, from);
      for (auto& op : p.operators) {
        rename_predicate_in(op.preconditions, from, to);
        rename_predicate_in(op.effects, from, to);
      }
      for (auto& prob : p.problems) {
        for (auto& a : prob.init) {
          if (a.predicate == from) a.predicate = to;
        }
        rename_predicate_in(prob.goal, from, to);
      }
      break;
    }
    case SymbolKind::Operator: {
      bool exists = false;
      for (auto& op : p.operators) {
        if (op.name == from) {
          op.name = to;
          exists = true;
        }
      }
      if (!exists) unknown_target(e.kind, from);
      break;
    }
    case SymbolKind::Problem: {
      bool exists = false;
      for (auto& prob : p.problems) {
        if (prob.name == from) {
          prob.name = to;
          exists = true;
        }
      }
      if (!exists) unknown_target(e.kind, from);
      break;
    }
  }
  unretire(p.language, e.kind, to);
}

struct EditApplier {
  Project& p;

  void operator()(const edit::DeclareClass& e) const {
    p.language.classes.push_back({e.name, e.parent});
    unretire(p.language, SymbolKind::Class, e.name);
  }
  void operator()(const edit::RemoveClass& e) const {
    const auto removed = std::erase_if(p.language.classes,
                                       [&](const kb::TypeDecl& c) { return c.name == e.name; });
    if (removed == 0) unknown_target(SymbolKind::Class, e.name);
    retire(p.language, SymbolKind::Class, e.name);
  }
  void operator()(const edit::DeclarePredicate& e) const {
    p.language.predicates.push_back(e.decl);
    unretire(p.language, SymbolKind::Predicate, e.decl.name);
  }
  void operator()(const edit::RemovePredicate& e) const {
    const auto removed = std::erase_if(p.language.predicates, [&](const pddl::PredicateDecl& d) {
      return d.name == e.name && d.arity() == e.arity;
    });
    if (removed == 0) {
      throw Error(Errc::UnknownTarget, "predicate '" + e.name + "/" +
                                           std::to_string(e.arity) + "' does not exist");
    }
    const bool still_declared =
        std::any_of(p.language.predicates.begin(), p.language.predicates.end(),
                    [&](const pddl::PredicateDecl& d) { return d.name == e.name; });
    if (!still_declared) retire(p.language, SymbolKind::Predicate, e.name);
  }
  void operator()(const edit::UpsertOperator& e) const {
    auto it = std::find_if(p.operators.begin(), p.operators.end(),
                           [&](const pddl::OperatorSchema& op) { return op.name == e.op.name; });
    if (it == p.operators.end()) {
      p.operators.push_back(e.op);
    } else {
      *it = e.op;
    }
  }
  void operator()(const edit::RemoveOperator& e) const {
    const auto removed = std::erase_if(
        p.operators, [&](const pddl::OperatorSchema& op) { return op.name == e.name; });
    if (removed == 0) unknown_target(SymbolKind::Operator, e.name);
  }
  void operator()(const edit::UpsertProblem& e) const {
    auto it = std::find_if(p.problems.begin(), p.problems.end(),
                           [&](const pddl::ProblemAst& pr) { return pr.name == e.problem.name; });
    if (it == p.problems.end()) {
      p.problems.push_back(e.problem);
    } else {
      *it = e.problem;
    }
  }
  void operator()(const edit::RemoveProblem& e) const {
    const auto removed = std::erase_if(
        p.problems, [&](const pddl::ProblemAst& pr) { return pr.name == e.name; });
    if (removed == 0) unknown_target(SymbolKind::Problem, e.name);
  }
  void operator()(const edit::RenameSymbol& e) const { rename(p, e); }
};

}  // namespace

EditResult apply_edit(const Project& project, const Edit& e) {
  Project next = project;
  std::visit(EditApplier{next}, e);
  auto diagnostics = check_consistency(next);
  return {std::move(next), std::move(diagnostics)};
}

// ---------------------------------------------------------------------------
// PDDL conversion

pddl::RequirementSet derive_requirements(const Project& project) {
  pddl::RequirementSet reqs;
  reqs.add(pddl::Requirement::Strips);
  const bool typed = std::any_of(project.language.classes.begin(), project.language.classes.end(),
                                 [](const kb::TypeDecl& c) { return c.name != pddl::kRootType; });
  if (typed) reqs.add(pddl::Requirement::Typing);
  auto has_negative = [](const std::vector<Literal>& lits) {
    return std::any_of(lits.begin(), lits.end(), [](const Literal& l) { return !l.positive; });
  };
  bool negative = std::any_of(project.operators.begin(), project.operators.end(),
                              [&](const auto& op) { return has_negative(op.preconditions); });
  negative = negative || std::any_of(project.problems.begin(), project.problems.end(),
                                     [&](const auto& pr) { return has_negative(pr.goal); });
  if (negative) reqs.add(pddl::Requirement::NegativePreconditions);
  return reqs;
}

pddl::DomainAst to_domain(const Project& project) {
  pddl::DomainAst d;
  d.name = project.name;
  d.requirements = derive_requirements(project);
  for (const auto& c : project.language.classes) d.types.declare(c.name, c.parent);
  d.predicates = project.language.predicates;
  d.constants = project.language.constants;
  d.actions = project.operators;
  return d;
}

Project project_from_pddl(const pddl::DomainAst& domain, std::vector<pddl::ProblemAst> problems,
                          kb::KnowledgeBase knowledge) {
  Project p = new_project(domain.name);
  p.kb = std::move(knowledge);
  for (const auto& t : domain.types.topological()) {
    p.language.classes.push_back({t, domain.types.parent_of(t)});
  }
  p.language.predicates = domain.predicates;
  p.language.constants = domain.constants;
  p.operators = domain.actions;
  p.problems = std::move(problems);
  return p;
}

PddlExport export_pddl(const Project& project, const std::optional<std::string>& problem_name) {
  if (project.language.predicates.empty() && project.operators.empty()) {
    throw Error(Errc::NoDomainContent, "project '" + project.name + "' has no predicates or operators");
  }
  const pddl::ProblemAst* problem = nullptr;
  if (problem_name) {
    problem = project.find_problem(*problem_name);
    if (problem == nullptr) throw Error(Errc::UnknownProblem, "no problem named '" + *problem_name + "'");
  }
  const auto diagnostics = check_consistency(project);
  if (has_errors(diagnostics)) {
    auto is_error = [](const Diagnostic& d) { return d.severity == Severity::Error; };
    const auto errors = std::count_if(diagnostics.begin(), diagnostics.end(), is_error);
    const auto first = std::find_if(diagnostics.begin(), diagnostics.end(), is_error);
    throw Error(Errc::RefusedOnErrors,
                std::to_string(errors) + " error diagnostic(s); first: " + to_string(*first));
  }
  PddlExport out;
  out.domain = pddl::print_domain(to_domain(project));
  if (problem != nullptr) out.problem = pddl::print_problem(*problem);
  return out;
}

}  // namespace pddlwb::ws
