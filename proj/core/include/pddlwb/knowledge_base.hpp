// Abstract domain knowledge: reusable type and predicate templates that the
// modeler offers for auto-completion and instantiates into declarations.

#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pddlwb/pddl.hpp"

namespace pddlwb::kb {

struct TypeTemplate {
  std::string name;

  friend bool operator==(const TypeTemplate&, const TypeTemplate&) = default;
  friend auto operator<=>(const TypeTemplate&, const TypeTemplate&) = default;
};

/// Template text form: `identifier type*`, e.g. `at physobj place`.
struct PredicateTemplate {
  std::string identifier;
  std::vector<std::string> param_types;

  std::size_t arity() const { return param_types.size(); }
  friend bool operator==(const PredicateTemplate&, const PredicateTemplate&) = default;
};

/// Orders by identifier, then arity.
bool template_less(const PredicateTemplate& a, const PredicateTemplate& b);

std::string to_string(const PredicateTemplate& t);

enum class TemplateKind { Type, Predicate };

using Template = std::variant<TypeTemplate, PredicateTemplate>;

std::string to_string(const Template& t);

/// Immutable set of templates. Both lists stay sorted and duplicate-free;
/// the `with_*` builders return a new value.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  const std::vector<TypeTemplate>& types() const { return types_; }
  const std::vector<PredicateTemplate>& predicates() const { return predicates_; }
  bool empty() const { return types_.empty() && predicates_.empty(); }

  /// Throws Error{DuplicateTemplate}.
  [[nodiscard]] KnowledgeBase with_type(TypeTemplate t) const;
  /// Identity is (identifier, arity). Throws Error{DuplicateTemplate}.
  [[nodiscard]] KnowledgeBase with_predicate(PredicateTemplate t) const;

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;

 private:
  std::vector<TypeTemplate> types_;
  std::vector<PredicateTemplate> predicates_;
};

/// Accepts `at physobj place` or `(at physobj place)`.
/// Throws Error{EmptyTemplate} or Error{MalformedToken}.
PredicateTemplate parse_template(std::string_view line);

/// Templates of `kind` whose identifier starts with `prefix`
/// (case-insensitive), in knowledge-base order.
std::vector<Template> complete(const KnowledgeBase& kb, TemplateKind kind,
                               std::string_view prefix);
std::vector<PredicateTemplate> complete_predicates(const KnowledgeBase& kb,
                                                   std::string_view prefix);
std::vector<TypeTemplate> complete_types(const KnowledgeBase& kb,
                                         std::string_view prefix);

/// Parameters are named ?x1..?xN in template order.
pddl::PredicateDecl instantiate_predicate(const PredicateTemplate& t);

struct TypeDecl {
  std::string name;
  std::string parent;

  friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

TypeDecl instantiate_type(const TypeTemplate& t, std::string_view parent);

/// KB file format: `[types]` and `[predicates]` sections, one template per
/// line, `#` starts a comment. Throws Error{MalformedLine} (line number in
/// the location) or Error{DuplicateTemplate}.
KnowledgeBase load_kb(std::string_view text);
std::string save_kb(const KnowledgeBase& kb);

/// Logistics-family templates shipped with the workbench.
KnowledgeBase default_logistics_kb();

}  // namespace pddlwb::kb
