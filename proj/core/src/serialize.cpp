#include "pddlwb/serialize.hpp"

namespace pddlwb::json {

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace {

Json atom_strings(const val::AtomSet& atoms) {
  Json out = Json::array();
  for (const auto& a : atoms) out.push_back(pddl::to_string(a));
  return out;
}

Json typed_list(const std::vector<pddl::TypedName>& items) {
  Json out = Json::array();
  for (const auto& t : items) out.push_back({{"name", t.name}, {"type", t.type}});
  return out;
}

Json atom_json(const pddl::Atom& a) { return {{"predicate", a.predicate}, {"args", a.args}}; }

Json literals(const std::vector<pddl::Literal>& lits) {
  Json out = Json::array();
  for (const auto& l : lits) out.push_back(to_json(l));
  return out;
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? to_json(*v) : Json(nullptr);
}

}  // namespace

Json to_json(const pddl::Literal& lit) {
  return {{"polarity", lit.positive ? "positive" : "negative"},
          {"predicate", lit.atom.predicate},
          {"args", lit.atom.args}};
}

Json to_json(const pddl::PlanStep& step) { return {{"name", step.action}, {"args", step.args}}; }

Json to_json(const pddl::Plan& plan) {
  Json steps = Json::array();
  for (const auto& s : plan.steps) steps.push_back(to_json(s));
  return {{"steps", steps}};
}

Json to_json(const pddl::OperatorSchema& op) {
  return {{"name", op.name},
          {"params", typed_list(op.params)},
          {"preconditions", literals(op.preconditions)},
          {"effects", literals(op.effects)}};
}

Json to_json(const pddl::ProblemAst& p) {
  Json init = Json::array();
  for (const auto& a : p.init) init.push_back(atom_json(a));
  return {{"name", p.name},
          {"domain", p.domain_name},
          {"objects", typed_list(p.objects)},
          {"init", init},
          {"goal", literals(p.goal)}};
}

Json to_json(const val::WorldState& state) { return atom_strings(state.atoms); }

Json to_json(const val::GroundAction& a) {
  return {{"name", a.name},        {"args", a.args},
          {"prePos", atom_strings(a.pre_pos)}, {"preNeg", atom_strings(a.pre_neg)},
          {"add", atom_strings(a.add)},        {"del", atom_strings(a.del)}};
}

Json to_json(const val::Unsatisfied& u) {
  return {{"atom", pddl::to_string(u.atom)},
          {"polarity", val::to_string(u.polarity)},
          {"reason", val::to_string(u.reason)}};
}

Json to_json(const val::Flaw& flaw) {
  Json unsat = Json::array();
  for (const auto& u : flaw.unsatisfied) unsat.push_back(to_json(u));
  return {{"stepIndex", flaw.step_index}, {"action", to_json(flaw.action)}, {"unsatisfied", unsat}};
}

Json to_json(const val::CausalLink& link) {
  return {{"producer", link.producer},
          {"consumer", link.consumer},
          {"atom", pddl::to_string(link.atom)},
          {"polarity", val::to_string(link.polarity)}};
}

Json to_json(const std::vector<val::CausalLink>& links) {
  Json out = Json::array();
  for (const auto& l : links) out.push_back(to_json(l));
  return out;
}

Json to_json(const val::ValidationReport& r) {
  Json states = Json::array();
  for (const auto& s : r.states) states.push_back(to_json(s));
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    steps.push_back({{"action", to_json(s.action)}, {"applicable", s.applicable}});
  }
  Json bind = nullptr;
  if (r.bind_failure) {
    bind = {{"stepIndex", r.bind_failure->step_index},
            {"step", to_json(r.bind_failure->step)},
            {"code", to_string(r.bind_failure->code)},
            {"message", r.bind_failure->message}};
  }
  return {{"states", states},
          {"steps", steps},
          {"flaw", optional_json(r.flaw)},
          {"goalSatisfied", r.goal_satisfied ? Json(*r.goal_satisfied) : Json(nullptr)},
          {"valid", r.valid},
          {"links", to_json(r.links)},
          {"bindFailure", bind}};
}

Json to_json(const repair::RepairAdvice& a) {
  Json targets = Json::array();
  for (const auto& t : a.targets) targets.push_back(to_json(t));
  Json option_b = Json::array();
  for (const auto& m : a.option_b) {
    option_b.push_back({{"kind", repair::to_string(m.kind)},
                        {"targetOperator", m.target_operator},
                        {"targetArity", m.target_arity},
                        {"change", to_json(m.change)},
                        {"sourceStep", m.source_step ? Json(*m.source_step) : Json(nullptr)},
                        {"target", to_json(m.target)}});
  }
  return {{"flaw", optional_json(a.flaw)},
          {"targets", targets},
          {"insertBefore", a.insert_before},
          {"optionA",
           {{"action", to_json(a.option_a.action)},
            {"instance", to_json(a.option_a.instance)},
            {"target", to_json(a.option_a.target)}}},
          {"optionB", option_b},
          {"adviceText", a.advice_text}};
}

Json to_json(const ws::Diagnostic& d) {
  return {{"severity", ws::to_string(d.severity)},
          {"code", ws::to_string(d.code)},
          {"level", ws::to_string(d.locus.level)},
          {"owner", d.locus.owner},
          {"detail", d.locus.detail}};
}

Json to_json(const std::vector<ws::Diagnostic>& diagnostics) {
  Json out = Json::array();
  for (const auto& d : diagnostics) out.push_back(to_json(d));
  return out;
}

Json to_json(const kb::Template& t) { return kb::to_string(t); }

Json to_json(const ws::Project& p) {
  Json kb_types = Json::array();
  for (const auto& t : p.kb.types()) kb_types.push_back(t.name);
  Json kb_preds = Json::array();
  for (const auto& t : p.kb.predicates()) kb_preds.push_back(kb::to_string(t));
  Json classes = Json::array();
  for (const auto& c : p.language.classes) classes.push_back({{"name", c.name}, {"parent", c.parent}});
  Json preds = Json::array();
  for (const auto& d : p.language.predicates) {
    preds.push_back({{"name", d.name}, {"params", typed_list(d.params)}});
  }
  Json retired = Json::array();
  for (const auto& r : p.language.retired) {
    retired.push_back({{"kind", ws::to_string(r.kind)}, {"name", r.name}});
  }
  Json ops = Json::array();
  for (const auto& op : p.operators) ops.push_back(to_json(op));
  Json probs = Json::array();
  for (const auto& pr : p.problems) probs.push_back(to_json(pr));
  return {{"name", p.name},
          {"kb", {{"types", kb_types}, {"predicates", kb_preds}}},
          {"language",
           {{"classes", classes},
            {"predicates", preds},
            {"constants", typed_list(p.language.constants)},
            {"retired", retired}}},
          {"operators", ops},
          {"problems", probs}};
}

// ---------------------------------------------------------------------------
// Readers

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::SchemaViolation, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

std::string str(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

const Json& array_field(const Json& j, const char* key) {
  static const Json empty = Json::array();
  if (!j.is_object()) bad(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) return empty;
  if (!it->is_array()) bad(std::string("field '") + key + "' must be a list");
  return *it;
}

std::vector<std::string> strings(const Json& j, const char* key) {
  std::vector<std::string> out;
  for (const auto& v : array_field(j, key)) {
    if (!v.is_string()) bad(std::string("field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<pddl::TypedName> typed_from(const Json& j, const char* key) {
  std::vector<pddl::TypedName> out;
  for (const auto& v : array_field(j, key)) out.push_back({str(v, "name"), str(v, "type")});
  return out;
}

std::vector<pddl::Literal> literals_from(const Json& j, const char* key) {
  std::vector<pddl::Literal> out;
  for (const auto& v : array_field(j, key)) out.push_back(literal_from_json(v));
  return out;
}

std::size_t index_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    bad(std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

pddl::PredicateDecl predicate_from(const Json& j) {
  return {str(j, "name"), typed_from(j, "params")};
}

}  // namespace

pddl::Literal literal_from_json(const Json& j) {
  const std::string polarity = j.contains("polarity") ? str(j, "polarity") : "positive";
  if (polarity != "positive" && polarity != "negative") bad("polarity must be positive or negative");
  return {polarity == "positive", {str(j, "predicate"), strings(j, "args")}};
}

pddl::OperatorSchema operator_from_json(const Json& j) {
  return {str(j, "name"), typed_from(j, "params"), literals_from(j, "preconditions"),
          literals_from(j, "effects")};
}

pddl::ProblemAst problem_from_json(const Json& j) {
  pddl::ProblemAst p;
  p.name = str(j, "name");
  p.domain_name = j.contains("domain") ? str(j, "domain") : std::string();
  p.objects = typed_from(j, "objects");
  for (const auto& a : array_field(j, "init")) p.init.push_back({str(a, "predicate"), strings(a, "args")});
  p.goal = literals_from(j, "goal");
  return p;
}

pddl::Plan plan_from_json(const Json& j) {
  if (j.is_string()) return pddl::parse_plan(j.get<std::string>());
  const Json& steps = j.is_array() ? j : array_field(j, "steps");
  pddl::Plan plan;
  for (const auto& s : steps) plan.steps.push_back({str(s, "name"), strings(s, "args")});
  return plan;
}

ws::Project project_from_json(const Json& j) {
  ws::Project p = ws::new_project(str(j, "name"));
  if (j.contains("kb")) {
    const Json& kbj = j["kb"];
    try {
      for (const auto& t : strings(kbj, "types")) p.kb = p.kb.with_type({t});
      for (const auto& t : strings(kbj, "predicates")) p.kb = p.kb.with_predicate(kb::parse_template(t));
    } catch (const Error& e) {
      if (e.code() == Errc::SchemaViolation) throw;
      bad("kb: " + e.detail());
    }
  }
  if (j.contains("language")) {
    const Json& lang = j["language"];
    for (const auto& c : array_field(lang, "classes")) {
      p.language.classes.push_back({str(c, "name"), str(c, "parent")});
    }
    for (const auto& d : array_field(lang, "predicates")) p.language.predicates.push_back(predicate_from(d));
    p.language.constants = typed_from(lang, "constants");
    for (const auto& r : array_field(lang, "retired")) {
      auto kind = ws::symbol_kind_from_string(str(r, "kind"));
      if (!kind) bad("unknown retired symbol kind");
      p.language.retired.push_back({*kind, str(r, "name")});
    }
  }
  for (const auto& op : array_field(j, "operators")) p.operators.push_back(operator_from_json(op));
  for (const auto& pr : array_field(j, "problems")) p.problems.push_back(problem_from_json(pr));
  return p;
}

ws::Edit edit_from_json(const Json& j) {
  const std::string kind = str(j, "kind");
  if (kind == "DeclareClass") return ws::edit::DeclareClass{str(j, "name"), str(j, "parent")};
  if (kind == "RemoveClass") return ws::edit::RemoveClass{str(j, "name")};
  if (kind == "DeclarePredicate") return ws::edit::DeclarePredicate{predicate_from(field(j, "predicate"))};
  if (kind == "RemovePredicate") return ws::edit::RemovePredicate{str(j, "name"), index_field(j, "arity")};
  if (kind == "UpsertOperator") return ws::edit::UpsertOperator{operator_from_json(field(j, "operator"))};
  if (kind == "RemoveOperator") return ws::edit::RemoveOperator{str(j, "name")};
  if (kind == "UpsertProblem") return ws::edit::UpsertProblem{problem_from_json(field(j, "problem"))};
  if (kind == "RemoveProblem") return ws::edit::RemoveProblem{str(j, "name")};
  if (kind == "RenameSymbol") {
    auto symbol = ws::symbol_kind_from_string(str(j, "symbolKind"));
    if (!symbol) bad("symbolKind must be class, predicate, operator or problem");
    return ws::edit::RenameSymbol{*symbol, str(j, "oldName"), str(j, "newName")};
  }
  bad("unknown edit kind '" + kind + "'");
}

repair::Choice choice_from_json(const Json& j) {
  const std::string option = str(j, "option");
  if (option == "A") return repair::ChooseA{};
  if (option == "B") return repair::ChooseB{index_field(j, "index")};
  throw Error(Errc::UnknownChoice, "option must be \"A\" or \"B\"");
}

}  // namespace pddlwb::json
