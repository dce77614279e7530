#include "pddlwb/app/cli.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "pddlwb/app/documents.hpp"
#include "pddlwb/app/service.hpp"
#include "pddlwb/planner.hpp"

namespace pddlwb::app {

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct Options {
  std::string project;
  std::string domain;
  std::string problem;
  std::string plan;
  std::string kb;
  std::string plugins;
  std::string format = "text";
  std::string out;

  // Subcommand specific.
  std::string export_kind;
  std::string planner;
  bool builtin_bfs = false;
  std::size_t max_states = planner::SearchLimits{}.max_states;
  std::size_t max_length = planner::SearchLimits{}.max_plan_length;
  std::size_t at = 0;
  bool advise = false;
  std::string apply;
  std::string plan_out;
  std::string kind = "predicate";
  std::string prefix;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(Errc::IoError, "cannot write " + path);
}

// Codes that describe the model or plan rather than the invocation.
bool domain_level(Errc c) {
  switch (c) {
    case Errc::NoPlanFound:
    case Errc::LimitExceeded:
    case Errc::NoFlaw:
    case Errc::IndexBeyondFlaw:
    case Errc::RefusedOnErrors:
    case Errc::StaleAdvice:
    case Errc::TimeoutError:
    case Errc::NoPlanInOutput:
      return true;
    default:
      return false;
  }
}

class Command {
 public:
  Command(const Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

  bool json() const { return o_.format == "json"; }

  void emit(const json::Json& j) { out_ << json::dump(j); }

  // Writes to --out when given, stdout otherwise.
  void deliver(const std::string& text) {
    if (o_.out.empty()) {
      out_ << text;
    } else {
      write_file(o_.out, text);
    }
  }

  const ws::Project& project() {
    if (!project_) {
      if (!o_.project.empty()) {
        project_ = ws::import_xml(read_file(o_.project));
      } else if (!o_.domain.empty()) {
        std::vector<pddl::ProblemAst> problems;
        if (!o_.problem.empty()) problems.push_back(pddl::parse_problem(read_file(o_.problem)));
        kb::KnowledgeBase knowledge;
        if (!o_.kb.empty()) knowledge = kb::load_kb(read_file(o_.kb));
        project_ = ws::project_from_pddl(pddl::parse_domain(read_file(o_.domain)), std::move(problems),
                                         std::move(knowledge));
      } else {
        throw Error(Errc::IoError, "either --project or --domain is required");
      }
    }
    return *project_;
  }

  pddl::DomainAst domain() {
    if (o_.project.empty() && !o_.domain.empty()) return pddl::parse_domain(read_file(o_.domain));
    return ws::to_domain(project());
  }

  // With --project, --problem names a problem inside it (default: the first).
  pddl::ProblemAst problem() {
    if (o_.project.empty()) {
      if (o_.problem.empty()) throw Error(Errc::IoError, "--problem is required");
      return pddl::parse_problem(read_file(o_.problem));
    }
    const auto& p = project();
    if (o_.problem.empty()) {
      if (p.problems.empty()) throw Error(Errc::UnknownProblem, "the project holds no problem");
      return p.problems.front();
    }
    const auto* found = p.find_problem(o_.problem);
    if (found == nullptr) throw Error(Errc::UnknownProblem, "no problem named '" + o_.problem + "'");
    return *found;
  }

  pddl::Plan plan() {
    if (o_.plan.empty()) throw Error(Errc::IoError, "--plan is required");
    return pddl::parse_plan(read_file(o_.plan));
  }

  int parse() {
    if (o_.project.empty() && o_.domain.empty() && o_.problem.empty() && o_.plan.empty()) {
      throw Error(Errc::IoError, "nothing to parse; give --domain, --problem or --plan");
    }
    std::optional<pddl::DomainAst> d;
    std::optional<pddl::ProblemAst> p;
    std::optional<pddl::Plan> pl;
    if (!o_.domain.empty() || !o_.project.empty()) d = domain();
    if (!o_.problem.empty()) p = problem();
    if (!o_.plan.empty()) pl = plan();
    if (json()) {
      json::Json doc = json::Json::object();
      if (d) doc["project"] = json::to_json(ws::project_from_pddl(*d, p ? std::vector{*p} : std::vector<pddl::ProblemAst>{}));
      if (p && !d) doc["problem"] = json::to_json(*p);
      if (pl) doc["plan"] = json::to_json(*pl);
      emit(doc);
    } else {
      std::string text;
      if (d) text += pddl::print_domain(*d);
      if (p) text += pddl::print_problem(*p);
      if (pl) text += pddl::print_plan(*pl);
      deliver(text);
    }
    return kOk;
  }

  int export_cmd() {
    if (o_.export_kind == "xml") {
      deliver(ws::export_xml(project()));
      return kOk;
    }
    std::optional<std::string> problem_name;
    if (!o_.problem.empty()) problem_name = o_.project.empty() ? problem().name : o_.problem;
    const auto e = ws::export_pddl(project(), problem_name);
    if (json()) {
      emit(export_document(e));
    } else {
      deliver(e.domain + (e.problem ? *e.problem : std::string()));
    }
    return kOk;
  }

  int check() {
    const auto diagnostics = ws::check_consistency(project());
    if (json()) {
      emit(json::to_json(diagnostics));
    } else {
      for (const auto& d : diagnostics) out_ << ws::to_string(d) << "\n";
      out_ << diagnostics.size() << (diagnostics.size() == 1 ? " diagnostic\n" : " diagnostics\n");
    }
    return diagnostics.empty() ? kOk : kFailure;
  }

  int plan_cmd() {
    const auto d = domain();
    const auto p = problem();
    pddl::Plan result;
    if (!o_.planner.empty()) {
      if (o_.plugins.empty()) throw Error(Errc::ConfigError, "--planner needs --plugins");
      const auto plugins = planner::load_plugins(read_file(o_.plugins));
      result = planner::invoke_planner(planner::find_plugin(plugins, o_.planner), pddl::print_domain(d),
                                       pddl::print_problem(p));
    } else {
      result = planner::bfs_plan(d, p, {o_.max_states, o_.max_length});
    }
    if (json()) {
      emit(json::to_json(result));
    } else {
      deliver(pddl::print_plan(result));
    }
    return kOk;
  }

  val::ValidationReport report() { return val::validate(domain(), problem(), plan()); }

  int validate() {
    const auto r = report();
    if (json()) {
      emit(json::to_json(r));
      return r.valid ? kOk : kFailure;
    }
    if (r.valid) {
      out_ << "valid: " << r.steps.size() << " steps reach the goal\n";
      return kOk;
    }
    if (r.bind_failure) {
      out_ << "invalid: step " << r.bind_failure->step_index << " " << pddl::to_string(r.bind_failure->step)
           << " cannot be bound: " << r.bind_failure->message << "\n";
    } else if (r.flaw) {
      out_ << "invalid: step " << r.flaw->step_index << " " << pddl::to_string(r.flaw->action)
           << " is not applicable\n";
      for (const auto& u : r.flaw->unsatisfied) {
        out_ << "  " << pddl::to_string(u.atom) << " " << val::to_string(u.reason) << "\n";
      }
    } else {
      out_ << "invalid: the goal is not reached\n";
      for (const auto& u : val::unsatisfied_goals(r.states.back(), problem().goal)) {
        out_ << "  " << pddl::to_string(u.atom) << " " << val::to_string(u.reason) << "\n";
      }
    }
    return kFailure;
  }

  int links() {
    const auto r = report();
    if (json()) {
      emit(json::to_json(r.links));
    } else {
      for (const auto& l : r.links) {
        out_ << l.producer << " -> " << l.consumer << "  " << pddl::to_string(l.atom) << "  "
             << val::to_string(l.polarity) << "\n";
      }
    }
    return kOk;
  }

  int state() {
    const auto r = report();
    const auto& s = val::state_at(r, o_.at);
    if (json()) {
      emit(json::to_json(s));
    } else {
      for (const auto& a : s.atoms) out_ << pddl::to_string(a) << "\n";
    }
    return kOk;
  }

  int repair_cmd() {
    if (o_.advise == !o_.apply.empty()) throw Error(Errc::IoError, "give exactly one of --advise or --apply");
    const auto d = domain();
    const auto p = problem();
    const auto pl = plan();
    const auto advice = repair::advise(d, p, pl, val::validate(d, p, pl));
    if (o_.advise) {
      if (json()) {
        emit(json::to_json(advice));
      } else {
        out_ << advice.advice_text << "\n";
      }
      return kOk;
    }

    repair::Choice choice;
    if (o_.apply == "A" || o_.apply == "a") {
      choice = repair::ChooseA{};
    } else if (o_.apply.size() > 2 && (o_.apply[0] == 'B' || o_.apply[0] == 'b') && o_.apply[1] == ':') {
      try {
        choice = repair::ChooseB{std::stoul(o_.apply.substr(2))};
      } catch (const std::exception&) {
        throw Error(Errc::UnknownChoice, "bad option B index in '" + o_.apply + "'");
      }
    } else {
      throw Error(Errc::UnknownChoice, "--apply takes A or B:<index>");
    }
    const auto result = repair::apply_advice(d, advice, choice);
    std::optional<pddl::Plan> augmented;
    if (result.achiever_name) augmented = repair::insert_achiever(pl, advice, *result.achiever_name);
    if (augmented && !o_.plan_out.empty()) write_file(o_.plan_out, pddl::print_plan(*augmented));

    const std::string artifact = o_.project.empty()
                                     ? pddl::print_domain(result.domain)
                                     : ws::export_xml(with_operators(project(), result.domain));
    if (json()) {
      if (!o_.out.empty()) write_file(o_.out, artifact);
      emit(repair_document(result, augmented));
      return kOk;
    }
    deliver(artifact);
    std::ostream& note = o_.out.empty() ? err_ : out_;
    if (result.achiever_name) note << "added action " << *result.achiever_name << "\n";
    for (const auto& diag : result.diagnostics) note << ws::to_string(diag) << "\n";
    return kOk;
  }

  int complete() {
    const auto knowledge = o_.kb.empty() ? kb::default_logistics_kb() : kb::load_kb(read_file(o_.kb));
    const auto kind = o_.kind == "type" ? kb::TemplateKind::Type : kb::TemplateKind::Predicate;
    json::Json list = json::Json::array();
    for (const auto& t : kb::complete(knowledge, kind, o_.prefix)) list.push_back(json::to_json(t));
    if (json()) {
      emit(list);
    } else {
      for (const auto& t : list) out_ << t.get<std::string>() << "\n";
    }
    return kOk;
  }

  int serve() {
    ServiceConfig config;
    config.data_dir = o_.data_dir;
    if (!o_.kb.empty()) config.kb = kb::load_kb(read_file(o_.kb));
    if (!o_.plugins.empty()) config.plugins = planner::load_plugins(read_file(o_.plugins));
    Service service(std::move(config));
    if (!service.bind(o_.host, o_.port)) {
      err_ << "error: cannot bind " << o_.host << ":" << o_.port << "\n";
      return kUsage;
    }
    err_ << "listening on " << o_.host << ":" << service.port() << "\n";
    service.listen();
    return kOk;
  }

 private:
  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
  std::optional<ws::Project> project_;
};

void add_inputs(CLI::App* cmd, Options& o, bool with_plan) {
  cmd->add_option("--project", o.project, "Project XML file");
  cmd->add_option("--domain", o.domain, "PDDL domain file");
  cmd->add_option("--problem", o.problem, "PDDL problem file, or a problem name with --project");
  if (with_plan) cmd->add_option("--plan", o.plan, "Plan file, one step per line");
  cmd->add_option("--kb", o.kb, "Knowledge base file");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--out", o.out, "Write the main artifact to this file");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Planning-domain workbench: model, check, plan, validate and repair STRIPS domains", "pddlwb"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pddlwb 0.3.0");

  auto* parse = app.add_subcommand("parse", "Parse PDDL inputs and print them in normal form");
  add_inputs(parse, o, true);

  auto* exp = app.add_subcommand("export", "Export a project as XML or PDDL");
  exp->add_option("kind", o.export_kind, "xml or pddl")->required()->check(CLI::IsMember({"xml", "pddl"}));
  add_inputs(exp, o, false);

  auto* check = app.add_subcommand("check", "Run the consistency checker");
  add_inputs(check, o, false);

  auto* plan = app.add_subcommand("plan", "Solve a problem with a plugin planner or the built-in BFS");
  add_inputs(plan, o, false);
  auto* planner_opt = plan->add_option("--planner", o.planner, "Plugin name from --plugins");
  auto* bfs_opt = plan->add_flag("--builtin-bfs", o.builtin_bfs, "Use the built-in breadth-first planner");
  planner_opt->excludes(bfs_opt);
  plan->add_option("--plugins", o.plugins, "Planner plugin configuration (JSON)");
  plan->add_option("--max-states", o.max_states, "BFS state limit")->check(CLI::PositiveNumber);
  plan->add_option("--max-length", o.max_length, "BFS plan length limit")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Validate a plan against a domain and problem");
  add_inputs(validate, o, true);

  auto* links = app.add_subcommand("links", "List the causal links of a plan");
  add_inputs(links, o, true);

  auto* state = app.add_subcommand("state", "Print the world state after step k (0 = initial)");
  add_inputs(state, o, true);
  state->add_option("--at", o.at, "Step index")->required();

  auto* repair = app.add_subcommand("repair", "Advise or apply a domain repair for a flawed plan");
  add_inputs(repair, o, true);
  repair->add_flag("--advise", o.advise, "Print repair advice");
  repair->add_option("--apply", o.apply, "Apply option A or B:<index>");
  repair->add_option("--plan-out", o.plan_out, "Write the plan with the new action inserted (option A)");

  auto* complete = app.add_subcommand("complete", "Auto-complete knowledge base templates");
  complete->add_option("--kb", o.kb, "Knowledge base file (default: built-in logistics)");
  complete->add_option("--kind", o.kind, "predicate or type")->check(CLI::IsMember({"predicate", "type"}));
  complete->add_option("--prefix", o.prefix, "Identifier prefix");
  complete->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", o.host, "Listen address");
  serve->add_option("--port", o.port, "Listen port (0 picks a free one)");
  serve->add_option("--data-dir", o.data_dir, "Directory for project snapshots");
  serve->add_option("--kb", o.kb, "Knowledge base for completion");
  serve->add_option("--plugins", o.plugins, "Planner plugin configuration (JSON)");

  std::vector<const char*> argv{"pddlwb"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  Command cmd(o, out, err);
  try {
    if (*parse) return cmd.parse();
    if (*exp) return cmd.export_cmd();
    if (*check) return cmd.check();
    if (*plan) return cmd.plan_cmd();
    if (*validate) return cmd.validate();
    if (*links) return cmd.links();
    if (*state) return cmd.state();
    if (*repair) return cmd.repair_cmd();
    if (*complete) return cmd.complete();
    if (*serve) return cmd.serve();
  } catch (const Error& e) {
    if (o.format == "json") {
      out << json::dump(error_document(e));
    } else {
      err << "error: " << e.what() << "\n";
    }
    return domain_level(e.code()) ? kFailure : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace pddlwb::app
