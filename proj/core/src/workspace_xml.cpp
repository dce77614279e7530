// Project <-> XML. Layout (version "1"):
//
// <kaviProject version="1" name="...">
//   <knowledgeBase>
//     <typeTemplate name="..."/>
//     <predicateTemplate identifier="..."><param type="..."/></predicateTemplate>
//   </knowledgeBase>
//   <language>
//     <classes><class name="..." parent="..."/></classes>
//     <predicates><predicate name="..."><param name="?x" type="..."/></predicate></predicates>
//     <constants><constant name="..." type="..."/></constants>
//     <retired><symbol kind="class|predicate|operator|problem" name="..."/></retired>
//   </language>
//   <operators>
//     <operator name="...">
//       <param name="?x" type="..."/>
//       <pre polarity="positive|negative" predicate="..."><arg var="..."/></pre>
//       <eff polarity="..." predicate="..."><arg var="..."/></eff>
//     </operator>
//   </operators>
//   <problems>
//     <problem name="..." domain="...">
//       <object name="..." type="..."/>
//       <init polarity="positive" predicate="..."><arg var="..."/></init>
//       <goal polarity="..." predicate="..."><arg var="..."/></goal>
//     </problem>
//   </problems>
// </kaviProject>

#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "pddlwb/workspace.hpp"

namespace pddlwb::ws {

namespace pt = boost::property_tree;

namespace {

constexpr const char* kAttr = "<xmlattr>";
constexpr const char* kRoot = "kaviProject";
constexpr const char* kVersion = "1";

pt::ptree& element(pt::ptree& parent, const std::string& name) {
  return parent.add_child(name, pt::ptree{});
}

void attr(pt::ptree& node, const std::string& key, const std::string& value) {
  node.put_child(std::string(kAttr) + "." + key, pt::ptree(value));
}

void write_literal(pt::ptree& parent, const std::string& tag, const pddl::Literal& lit) {
  auto& node = element(parent, tag);
  attr(node, "polarity", lit.positive ? "positive" : "negative");
  attr(node, "predicate", lit.atom.predicate);
  for (const auto& a : lit.atom.args) attr(element(node, "arg"), "var", a);
}

void write_typed(pt::ptree& parent, const std::string& tag, const pddl::TypedName& t) {
  auto& node = element(parent, tag);
  attr(node, "name", t.name);
  attr(node, "type", t.type);
}

}  // namespace

std::string export_xml(const Project& project) {
  pt::ptree doc;
  auto& root = element(doc, kRoot);
  attr(root, "version", kVersion);
  attr(root, "name", project.name);

  auto& kb_node = element(root, "knowledgeBase");
  for (const auto& t : project.kb.types()) attr(element(kb_node, "typeTemplate"), "name", t.name);
  for (const auto& t : project.kb.predicates()) {
    auto& node = element(kb_node, "predicateTemplate");
    attr(node, "identifier", t.identifier);
    for (const auto& p : t.param_types) attr(element(node, "param"), "type", p);
  }

  auto& lang = element(root, "language");
  auto& classes = element(lang, "classes");
  for (const auto& c : project.language.classes) {
    auto& node = element(classes, "class");
    attr(node, "name", c.name);
    attr(node, "parent", c.parent);
  }
  auto& preds = element(lang, "predicates");
  for (const auto& p : project.language.predicates) {
    auto& node = element(preds, "predicate");
    attr(node, "name", p.name);
    for (const auto& param : p.params) write_typed(node, "param", param);
  }
  auto& consts = element(lang, "constants");
  for (const auto& c : project.language.constants) write_typed(consts, "constant", c);
  auto& retired = element(lang, "retired");
  for (const auto& r : project.language.retired) {
    auto& node = element(retired, "symbol");
    attr(node, "kind", std::string(to_string(r.kind)));
    attr(node, "name", r.name);
  }

  auto& ops = element(root, "operators");
  for (const auto& op : project.operators) {
    auto& node = element(ops, "operator");
    attr(node, "name", op.name);
    for (const auto& param : op.params) write_typed(node, "param", param);
    for (const auto& l : op.preconditions) write_literal(node, "pre", l);
    for (const auto& l : op.effects) write_literal(node, "eff", l);
  }

  auto& probs = element(root, "problems");
  for (const auto& pr : project.problems) {
    auto& node = element(probs, "problem");
    attr(node, "name", pr.name);
    attr(node, "domain", pr.domain_name);
    for (const auto& o : pr.objects) write_typed(node, "object", o);
    for (const auto& a : pr.init) write_literal(node, "init", {true, a});
    for (const auto& l : pr.goal) write_literal(node, "goal", l);
  }

  std::ostringstream os;
  pt::write_xml(os, doc, pt::xml_writer_make_settings<std::string>(' ', 2));
  return os.str();
}

namespace {

[[noreturn]] void violation(const std::string& path, const std::string& what) {
  throw Error(Errc::SchemaViolation, path + ": " + what);
}

/// Strict element reader: every attribute and child must be consumed by
/// name, anything else is a schema violation.
class Element {
 public:
  Element(const pt::ptree& node, std::string path) : node_(node), path_(std::move(path)) {
    if (auto attrs = node_.get_child_optional(kAttr)) {
      for (const auto& [key, value] : *attrs) attrs_.emplace(key, value.data());
    }
  }

  const std::string& path() const { return path_; }

  std::string required(const std::string& key) {
    auto it = attrs_.find(key);
    if (it == attrs_.end()) violation(path_, "missing attribute '" + key + "'");
    std::string v = it->second;
    attrs_.erase(it);
    return v;
  }

  std::string optional(const std::string& key, std::string fallback = {}) {
    auto it = attrs_.find(key);
    if (it == attrs_.end()) return fallback;
    std::string v = it->second;
    attrs_.erase(it);
    return v;
  }

  /// Children in document order, checked against `allowed`.
  std::vector<std::pair<std::string, Element>> children(const std::set<std::string>& allowed) {
    std::vector<std::pair<std::string, Element>> out;
    std::map<std::string, int> counts;
    for (const auto& [tag, child] : node_) {
      if (tag == kAttr || tag == "<xmlcomment>") continue;
      if (!allowed.contains(tag)) violation(path_, "unexpected element <" + tag + ">");
      const int n = ++counts[tag];
      out.emplace_back(tag, Element(child, path_ + "/" + tag + "[" + std::to_string(n) + "]"));
    }
    return out;
  }

  void finish() const {
    if (!attrs_.empty()) violation(path_, "unknown attribute '" + attrs_.begin()->first + "'");
    const auto& text = node_.data();
    if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
      violation(path_, "unexpected text content");
    }
  }

 private:
  const pt::ptree& node_;
  std::string path_;
  std::map<std::string, std::string> attrs_;
};

pddl::TypedName read_typed(Element& e) {
  pddl::TypedName t{e.required("name"), e.required("type")};
  e.children({});
  e.finish();
  return t;
}

pddl::Literal read_literal(Element& e) {
  pddl::Literal lit;
  const std::string polarity = e.required("polarity");
  if (polarity == "positive") {
    lit.positive = true;
  } else if (polarity == "negative") {
    lit.positive = false;
  } else {
    violation(e.path(), "polarity must be positive or negative");
  }
  lit.atom.predicate = e.required("predicate");
  for (auto& [tag, arg] : e.children({"arg"})) {
    lit.atom.args.push_back(arg.required("var"));
    arg.children({});
    arg.finish();
  }
  e.finish();
  return lit;
}

void read_kb(Element& e, Project& p) {
  for (auto& [tag, child] : e.children({"typeTemplate", "predicateTemplate"})) {
    try {
      if (tag == "typeTemplate") {
        p.kb = p.kb.with_type({child.required("name")});
        child.children({});
      } else {
        kb::PredicateTemplate t{child.required("identifier"), {}};
        for (auto& [ptag, param] : child.children({"param"})) {
          t.param_types.push_back(param.required("type"));
          param.children({});
          param.finish();
        }
        p.kb = p.kb.with_predicate(std::move(t));
      }
    } catch (const Error& err) {
      if (err.code() != Errc::DuplicateTemplate) throw;
      violation(child.path(), err.detail());
    }
    child.finish();
  }
  e.finish();
}

void read_language(Element& e, Project& p) {
  for (auto& [tag, section] : e.children({"classes", "predicates", "constants", "retired"})) {
    if (tag == "classes") {
      for (auto& [ctag, c] : section.children({"class"})) {
        p.language.classes.push_back({c.required("name"), c.required("parent")});
        c.children({});
        c.finish();
      }
    } else if (tag == "predicates") {
      for (auto& [ptag, pe] : section.children({"predicate"})) {
        pddl::PredicateDecl decl{pe.required("name"), {}};
        for (auto& [xtag, param] : pe.children({"param"})) decl.params.push_back(read_typed(param));
        pe.finish();
        p.language.predicates.push_back(std::move(decl));
      }
    } else if (tag == "constants") {
      for (auto& [ctag, c] : section.children({"constant"})) {
        p.language.constants.push_back(read_typed(c));
      }
    } else {
      for (auto& [stag, s] : section.children({"symbol"})) {
        const std::string kind = s.required("kind");
        auto parsed = symbol_kind_from_string(kind);
        if (!parsed) violation(s.path(), "unknown symbol kind '" + kind + "'");
        p.language.retired.push_back({*parsed, s.required("name")});
        s.children({});
        s.finish();
      }
    }
    section.finish();
  }
  e.finish();
}

void read_operators(Element& e, Project& p) {
  for (auto& [tag, oe] : e.children({"operator"})) {
    pddl::OperatorSchema op;
    op.name = oe.required("name");
    for (auto& [ctag, child] : oe.children({"param", "pre", "eff"})) {
      if (ctag == "param") {
        op.params.push_back(read_typed(child));
      } else if (ctag == "pre") {
        op.preconditions.push_back(read_literal(child));
      } else {
        op.effects.push_back(read_literal(child));
      }
    }
    oe.finish();
    p.operators.push_back(std::move(op));
  }
  e.finish();
}

void read_problems(Element& e, Project& p) {
  for (auto& [tag, pe] : e.children({"problem"})) {
    pddl::ProblemAst prob;
    prob.name = pe.required("name");
    prob.domain_name = pe.optional("domain");
    for (auto& [ctag, child] : pe.children({"object", "init", "goal"})) {
      if (ctag == "object") {
        prob.objects.push_back(read_typed(child));
      } else if (ctag == "init") {
        auto lit = read_literal(child);
        if (!lit.positive) violation(child.path(), "init facts must be positive");
        prob.init.push_back(std::move(lit.atom));
      } else {
        prob.goal.push_back(read_literal(child));
      }
    }
    pe.finish();
    p.problems.push_back(std::move(prob));
  }
  e.finish();
}

}  // namespace

Project import_xml(std::string_view text) {
  pt::ptree doc;
  try {
    std::istringstream is{std::string(text)};
    pt::read_xml(is, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw Error(Errc::SchemaViolation, std::string("not well-formed XML: ") + e.message(),
                Location{static_cast<int>(e.line()), 1});
  }
  std::optional<Element> root;
  for (const auto& [tag, child] : doc) {
    if (tag == "<xmlcomment>") continue;
    if (tag != kRoot || root) violation("/", "root element must be a single <kaviProject>");
    root.emplace(child, std::string("/") + kRoot);
  }
  if (!root) violation("/", "root element must be a single <kaviProject>");

  const std::string version = root->required("version");
  if (version != kVersion) {
    throw Error(Errc::UnsupportedVersion, "document version '" + version + "' (expected 1)");
  }
  Project p = new_project(root->required("name"));
  std::set<std::string> seen;
  for (auto& [tag, child] : root->children({"knowledgeBase", "language", "operators", "problems"})) {
    if (!seen.insert(tag).second) violation(root->path(), "repeated <" + tag + ">");
    if (tag == "knowledgeBase") {
      read_kb(child, p);
    } else if (tag == "language") {
      read_language(child, p);
    } else if (tag == "operators") {
      read_operators(child, p);
    } else {
      read_problems(child, p);
    }
  }
  root->finish();
  return p;
}

}  // namespace pddlwb::ws
