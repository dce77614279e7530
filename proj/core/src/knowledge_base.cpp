#include "pddlwb/knowledge_base.hpp"

#include <algorithm>
#include <sstream>

#include "pddlwb/sexpr.hpp"

namespace pddlwb::kb {

bool template_less(const PredicateTemplate& a, const PredicateTemplate& b) {
  if (a.identifier != b.identifier) return a.identifier < b.identifier;
  return a.arity() < b.arity();
}

std::string to_string(const PredicateTemplate& t) {
  std::string out = t.identifier;
  for (const auto& p : t.param_types) out += " " + p;
  return out;
}

std::string to_string(const Template& t) {
  return std::visit(
      [](const auto& v) -> std::string {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, TypeTemplate>) {
          return v.name;
        } else {
          return to_string(v);
        }
      },
      t);
}

KnowledgeBase KnowledgeBase::with_type(TypeTemplate t) const {
  auto it = std::lower_bound(types_.begin(), types_.end(), t);
  if (it != types_.end() && *it == t) {
    throw Error(Errc::DuplicateTemplate, "type template '" + t.name + "' already exists");
  }
  KnowledgeBase next = *this;
  next.types_.insert(next.types_.begin() + (it - types_.begin()), std::move(t));
  return next;
}

KnowledgeBase KnowledgeBase::with_predicate(PredicateTemplate t) const {
  auto it = std::lower_bound(predicates_.begin(), predicates_.end(), t, template_less);
  if (it != predicates_.end() && !template_less(t, *it)) {
    throw Error(Errc::DuplicateTemplate, "predicate template '" + t.identifier + "/" +
                                             std::to_string(t.arity()) + "' already exists");
  }
  KnowledgeBase next = *this;
  next.predicates_.insert(next.predicates_.begin() + (it - predicates_.begin()), std::move(t));
  return next;
}

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

void check_token(const std::string& tok) {
  if (tok.find_first_of("()?") != std::string::npos) {
    throw Error(Errc::MalformedToken, "bad template token '" + tok + "'");
  }
}

}  // namespace

PredicateTemplate parse_template(std::string_view line) {
  std::string_view body = trim(line);
  if (body.size() >= 2 && body.front() == '(' && body.back() == ')') {
    body = body.substr(1, body.size() - 2);
  }
  auto tokens = split_ws(sexpr::lowercase(body));
  if (tokens.empty()) throw Error(Errc::EmptyTemplate, "template has no identifier");
  for (const auto& tok : tokens) check_token(tok);
  PredicateTemplate t;
  t.identifier = tokens.front();
  t.param_types.assign(tokens.begin() + 1, tokens.end());
  return t;
}

std::vector<PredicateTemplate> complete_predicates(const KnowledgeBase& kb,
                                                   std::string_view prefix) {
  const std::string p = sexpr::lowercase(prefix);
  std::vector<PredicateTemplate> out;
  for (const auto& t : kb.predicates()) {
    if (t.identifier.starts_with(p)) out.push_back(t);
  }
  return out;
}

std::vector<TypeTemplate> complete_types(const KnowledgeBase& kb, std::string_view prefix) {
  const std::string p = sexpr::lowercase(prefix);
  std::vector<TypeTemplate> out;
  for (const auto& t : kb.types()) {
    if (t.name.starts_with(p)) out.push_back(t);
  }
  return out;
}

std::vector<Template> complete(const KnowledgeBase& kb, TemplateKind kind,
                               std::string_view prefix) {
  std::vector<Template> out;
  if (kind == TemplateKind::Type) {
    for (auto& t : complete_types(kb, prefix)) out.emplace_back(std::move(t));
  } else {
    for (auto& t : complete_predicates(kb, prefix)) out.emplace_back(std::move(t));
  }
  return out;
}

pddl::PredicateDecl instantiate_predicate(const PredicateTemplate& t) {
  pddl::PredicateDecl decl{t.identifier, {}};
  for (std::size_t i = 0; i < t.param_types.size(); ++i) {
    decl.params.push_back({"?x" + std::to_string(i + 1), t.param_types[i]});
  }
  return decl;
}

TypeDecl instantiate_type(const TypeTemplate& t, std::string_view parent) {
  return {t.name, std::string(parent)};
}

KnowledgeBase load_kb(std::string_view text) {
  enum class Section { None, Types, Predicates } section = Section::None;
  KnowledgeBase kb;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const Location where{line_no, 1};
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const std::string lower = sexpr::lowercase(line);
    if (lower == "[types]") {
      section = Section::Types;
      continue;
    }
    if (lower == "[predicates]") {
      section = Section::Predicates;
      continue;
    }
    try {
      switch (section) {
        case Section::None:
          throw Error(Errc::MalformedLine, "template outside a section", where);
        case Section::Types: {
          auto tokens = split_ws(lower);
          if (tokens.size() != 1) {
            throw Error(Errc::MalformedLine, "type line must hold one name", where);
          }
          check_token(tokens.front());
          kb = kb.with_type({tokens.front()});
          break;
        }
        case Section::Predicates:
          kb = kb.with_predicate(parse_template(lower));
          break;
      }
    } catch (const Error& e) {
      if (e.code() == Errc::DuplicateTemplate) throw Error(e.code(), e.detail(), where);
      if (e.where()) throw;
      throw Error(Errc::MalformedLine, e.detail(), where);
    }
  }
  return kb;
}

std::string save_kb(const KnowledgeBase& kb) {
  std::string out = "[types]\n";
  for (const auto& t : kb.types()) out += t.name + "\n";
  out += "[predicates]\n";
  for (const auto& p : kb.predicates()) out += to_string(p) + "\n";
  return out;
}

KnowledgeBase default_logistics_kb() {
  KnowledgeBase kb;
  for (const char* t : {"physobj", "place", "package", "truck", "location", "city",
                        "airport", "airplane"}) {
    kb = kb.with_type({t});
  }
  kb = kb.with_predicate({"at", {"physobj", "place"}});
  kb = kb.with_predicate({"in", {"package", "truck"}});
  kb = kb.with_predicate({"in-city", {"place", "city"}});
  return kb;
}

}  // namespace pddlwb::kb
