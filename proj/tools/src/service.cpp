#include "pddlwb/app/service.hpp"

#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "pddlwb/app/documents.hpp"

namespace pddlwb::app {

namespace fs = std::filesystem;
using json::Json;

namespace {

constexpr const char* kIdPattern = "([A-Za-z0-9_-]+)";
constexpr const char* kSnapshotSuffix = ".kavi.xml";

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

// Last validation run against a project revision, with advice derived from it.
struct Session {
  std::uint64_t revision = 0;
  pddl::DomainAst domain;
  pddl::ProblemAst problem;
  pddl::Plan plan;
  val::ValidationReport report;
  std::optional<repair::RepairAdvice> advice;
};

struct Entry {
  std::shared_mutex mu;
  bool exists = false;
  ws::Project project;
  std::uint64_t revision = 0;
  std::optional<Session> session;
};

struct Job {
  std::mutex mu;
  std::string status = "running";
  std::optional<pddl::Plan> plan;
  std::optional<Json> error;
};

int status_for(Errc code) {
  switch (code) {
    case Errc::UnknownProblem:
      return 404;
    default:
      return 400;
  }
}

Json parse_body(const httplib::Request& req) {
  if (req.body.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
  Json body;
  try {
    body = Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    throw HttpError{400, "MalformedPayload", e.what()};
  }
  if (!body.is_object()) throw HttpError{400, "MalformedPayload", "request body must be a JSON object"};
  return body;
}

std::optional<std::uint64_t> requested_revision(const Json& body) {
  auto it = body.find("revision");
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_unsigned()) throw HttpError{400, "MalformedPayload", "revision must be a non-negative integer"};
  return it->get<std::uint64_t>();
}

// Reads may omit the revision; mutations must send the one they were based on.
void check_revision(const Json& body, const Entry& e, bool required) {
  const auto rev = requested_revision(body);
  if (!rev) {
    if (required) throw HttpError{400, "MalformedPayload", "revision is required for this request"};
    return;
  }
  if (*rev != e.revision) {
    throw HttpError{409, "RevisionConflict",
                    "request is based on revision " + std::to_string(*rev) + ", project is at revision " +
                        std::to_string(e.revision)};
  }
}

std::string string_field(const Json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return {};
  if (!it->is_string()) throw HttpError{400, "MalformedPayload", std::string(key) + " must be a string"};
  return it->get<std::string>();
}

const pddl::ProblemAst& pick_problem(const ws::Project& p, const std::string& name) {
  if (name.empty()) {
    if (p.problems.empty()) throw Error(Errc::UnknownProblem, "the project holds no problem");
    return p.problems.front();
  }
  const auto* found = p.find_problem(name);
  if (found == nullptr) throw Error(Errc::UnknownProblem, "no problem named '" + name + "'");
  return *found;
}

void reply(httplib::Response& res, int status, const Json& body, std::optional<std::uint64_t> revision) {
  res.status = status;
  if (revision) res.set_header("X-Revision", std::to_string(*revision));
  res.set_content(json::dump(body), "application/json");
}

}  // namespace

struct Service::Impl {
  ServiceConfig config;
  httplib::Server server;
  int bound_port = -1;

  std::shared_mutex map_mu;
  std::map<std::string, std::shared_ptr<Entry>> projects;

  std::mutex jobs_mu;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::vector<std::thread> workers;
  std::atomic<std::uint64_t> next_job{1};

  explicit Impl(ServiceConfig c) : config(std::move(c)) {
    load_snapshots();
    routes();
  }

  ~Impl() {
    std::lock_guard lock(jobs_mu);
    for (auto& t : workers) {
      if (t.joinable()) t.join();
    }
  }

  // ---- persistence -------------------------------------------------------

  void load_snapshots() {
    if (config.data_dir.empty()) return;
    fs::create_directories(config.data_dir);
    for (const auto& f : fs::directory_iterator(config.data_dir)) {
      const std::string name = f.path().filename().string();
      if (!name.ends_with(kSnapshotSuffix)) continue;
      std::ifstream in(f.path(), std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      auto e = std::make_shared<Entry>();
      e->project = ws::import_xml(ss.str());
      e->exists = true;
      e->revision = 1;
      projects[name.substr(0, name.size() - std::string_view(kSnapshotSuffix).size())] = std::move(e);
    }
  }

  void snapshot(const std::string& id, const ws::Project& p) {
    if (config.data_dir.empty()) return;
    const fs::path target = fs::path(config.data_dir) / (id + kSnapshotSuffix);
    const fs::path tmp = target.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out << ws::export_xml(p);
      if (!out) throw Error(Errc::IoError, "cannot write snapshot " + tmp.string());
    }
    fs::rename(tmp, target);
  }

  // Caller holds the entry's writer lock.
  std::uint64_t commit(const std::string& id, Entry& e, ws::Project next) {
    snapshot(id, next);
    e.project = std::move(next);
    e.exists = true;
    e.session.reset();
    return ++e.revision;
  }

  std::shared_ptr<Entry> find(const std::string& id) {
    std::shared_lock lock(map_mu);
    auto it = projects.find(id);
    if (it == projects.end() || !it->second->exists) throw HttpError{404, "UnknownProject", "no project '" + id + "'"};
    return it->second;
  }

  std::shared_ptr<Entry> find_or_create(const std::string& id) {
    std::unique_lock lock(map_mu);
    auto& slot = projects[id];
    if (!slot) slot = std::make_shared<Entry>();
    return slot;
  }

  // ---- routing -----------------------------------------------------------

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  static Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const HttpError& e) {
        reply(res, e.status, {{"error", {{"code", e.code}, {"message", e.message}}}}, std::nullopt);
      } catch (const Error& e) {
        reply(res, status_for(e.code()), error_document(e), std::nullopt);
      } catch (const std::exception& e) {
        reply(res, 500, {{"error", {{"code", "Internal"}, {"message", e.what()}}}}, std::nullopt);
      }
    };
  }

  void routes() {
    const std::string project = std::string("/projects/") + kIdPattern;
    server.Put(project, guarded([this](const auto& req, auto& res) { put_project(req, res); }));
    server.Get(project, guarded([this](const auto& req, auto& res) { get_project(req, res); }));
    server.Post(project + "/edits", guarded([this](const auto& req, auto& res) { edits(req, res); }));
    server.Post(project + "/check", guarded([this](const auto& req, auto& res) { check(req, res); }));
    server.Post(project + "/export/pddl", guarded([this](const auto& req, auto& res) { export_pddl(req, res); }));
    server.Get("/kb/complete", guarded([this](const auto& req, auto& res) { complete(req, res); }));
    server.Post(project + "/plan", guarded([this](const auto& req, auto& res) { plan(req, res); }));
    server.Get(std::string("/jobs/") + kIdPattern, guarded([this](const auto& req, auto& res) { job(req, res); }));
    server.Post(project + "/validate", guarded([this](const auto& req, auto& res) { validate(req, res); }));
    server.Get(project + "/report/state/([0-9]+)", guarded([this](const auto& req, auto& res) { state(req, res); }));
    server.Get(project + "/report/links", guarded([this](const auto& req, auto& res) { links(req, res); }));
    server.Post(project + "/repair/advise", guarded([this](const auto& req, auto& res) { advise(req, res); }));
    server.Post(project + "/repair/apply", guarded([this](const auto& req, auto& res) { apply(req, res); }));
  }

  // ---- handlers ----------------------------------------------------------

  static ws::Project project_from_body(const std::string& id, const Json& body) {
    if (body.contains("project")) return json::project_from_json(body["project"]);
    if (body.contains("xml")) return ws::import_xml(string_field(body, "xml"));
    if (body.contains("domain")) {
      std::vector<pddl::ProblemAst> problems;
      if (body.contains("problems")) {
        if (!body["problems"].is_array()) throw HttpError{400, "MalformedPayload", "problems must be a list"};
        for (const auto& p : body["problems"]) {
          if (!p.is_string()) throw HttpError{400, "MalformedPayload", "problems must hold PDDL texts"};
          problems.push_back(pddl::parse_problem(p.get<std::string>()));
        }
      }
      auto p = ws::project_from_pddl(pddl::parse_domain(string_field(body, "domain")), std::move(problems));
      if (p.name.empty()) p.name = id;
      return p;
    }
    throw HttpError{400, "MalformedPayload", "expected one of project, xml or domain"};
  }

  void put_project(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const Json body = parse_body(req);
    ws::Project next = project_from_body(id, body);
    auto entry = find_or_create(id);
    std::unique_lock lock(entry->mu);
    const bool created = !entry->exists;
    if (!created) {
      const auto rev = requested_revision(body);
      if (!rev || *rev != entry->revision) {
        throw HttpError{409, "RevisionConflict",
                        "project '" + id + "' exists at revision " + std::to_string(entry->revision) +
                            "; send that revision to replace it"};
      }
    }
    auto diagnostics = ws::check_consistency(next);
    const auto rev = commit(id, *entry, std::move(next));
    reply(res, created ? 201 : 200, {{"revision", rev}, {"diagnostics", json::to_json(diagnostics)}}, rev);
  }

  void get_project(const httplib::Request& req, httplib::Response& res) {
    auto entry = find(req.matches[1]);
    std::shared_lock lock(entry->mu);
    reply(res, 200, json::to_json(entry->project), entry->revision);
  }

  void edits(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const Json body = parse_body(req);
    std::vector<ws::Edit> list;
    if (body.contains("edit")) list.push_back(json::edit_from_json(body["edit"]));
    if (body.contains("edits")) {
      if (!body["edits"].is_array()) throw HttpError{400, "MalformedPayload", "edits must be a list"};
      for (const auto& e : body["edits"]) list.push_back(json::edit_from_json(e));
    }
    if (list.empty()) throw HttpError{400, "MalformedPayload", "no edits given"};

    auto entry = find(id);
    std::unique_lock lock(entry->mu);
    check_revision(body, *entry, true);
    ws::EditResult result{entry->project, {}};
    for (const auto& e : list) result = ws::apply_edit(result.project, e);
    const auto rev = commit(id, *entry, std::move(result.project));
    reply(res, 200, {{"revision", rev}, {"diagnostics", json::to_json(result.diagnostics)}}, rev);
  }

  void check(const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    auto entry = find(req.matches[1]);
    std::shared_lock lock(entry->mu);
    check_revision(body, *entry, false);
    reply(res, 200, json::to_json(ws::check_consistency(entry->project)), entry->revision);
  }

  void export_pddl(const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    auto entry = find(req.matches[1]);
    std::shared_lock lock(entry->mu);
    check_revision(body, *entry, false);
    std::optional<std::string> problem;
    if (auto name = string_field(body, "problem"); !name.empty()) problem = name;
    reply(res, 200, export_document(ws::export_pddl(entry->project, problem)), entry->revision);
  }

  void complete(const httplib::Request& req, httplib::Response& res) {
    const std::string kind = req.has_param("kind") ? req.get_param_value("kind") : "predicate";
    if (kind != "predicate" && kind != "type") {
      throw HttpError{400, "MalformedPayload", "kind must be predicate or type"};
    }
    const auto found = kb::complete(config.kb, kind == "type" ? kb::TemplateKind::Type : kb::TemplateKind::Predicate,
                                    req.get_param_value("prefix"));
    Json list = Json::array();
    for (const auto& t : found) list.push_back(json::to_json(t));
    reply(res, 200, list, std::nullopt);
  }

  void plan(const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    const std::string planner_name = string_field(body, "planner");
    auto entry = find(req.matches[1]);
    pddl::DomainAst domain;
    pddl::ProblemAst problem;
    std::uint64_t revision = 0;
    {
      std::shared_lock lock(entry->mu);
      check_revision(body, *entry, false);
      domain = ws::to_domain(entry->project);
      problem = pick_problem(entry->project, string_field(body, "problem"));
      revision = entry->revision;
    }
    if (planner_name.empty() || planner_name == "builtin-bfs") {
      reply(res, 200, json::to_json(planner::bfs_plan(domain, problem, config.limits)), revision);
      return;
    }
    const auto plugin = planner::find_plugin(config.plugins, planner_name);
    const std::string job_id = "job-" + std::to_string(next_job++);
    auto job = std::make_shared<Job>();
    {
      std::lock_guard lock(jobs_mu);
      jobs[job_id] = job;
      workers.emplace_back([job, plugin, d = pddl::print_domain(domain), p = pddl::print_problem(problem)] {
        std::optional<pddl::Plan> found;
        std::optional<Json> failure;
        try {
          found = planner::invoke_planner(plugin, d, p);
        } catch (const Error& e) {
          failure = error_document(e)["error"];
        } catch (const std::exception& e) {
          failure = Json{{"code", "Internal"}, {"message", e.what()}};
        }
        std::lock_guard jl(job->mu);
        job->plan = std::move(found);
        job->error = std::move(failure);
        job->status = job->plan ? "done" : "failed";
      });
    }
    reply(res, 202, {{"job", job_id}, {"status", "running"}}, revision);
  }

  void job(const httplib::Request& req, httplib::Response& res) {
    std::shared_ptr<Job> job;
    {
      std::lock_guard lock(jobs_mu);
      auto it = jobs.find(req.matches[1]);
      if (it == jobs.end()) throw HttpError{404, "UnknownJob", "no job '" + std::string(req.matches[1]) + "'"};
      job = it->second;
    }
    std::lock_guard lock(job->mu);
    Json doc{{"job", std::string(req.matches[1])}, {"status", job->status}};
    if (job->plan) doc["plan"] = json::to_json(*job->plan);
    if (job->error) doc["error"] = *job->error;
    reply(res, 200, doc, std::nullopt);
  }

  void validate(const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    if (!body.contains("plan")) throw HttpError{400, "MalformedPayload", "plan is required"};
    const pddl::Plan plan = json::plan_from_json(body["plan"]);
    auto entry = find(req.matches[1]);
    std::unique_lock lock(entry->mu);
    check_revision(body, *entry, false);
    Session s;
    s.revision = entry->revision;
    s.domain = ws::to_domain(entry->project);
    s.problem = pick_problem(entry->project, string_field(body, "problem"));
    s.plan = plan;
    s.report = val::validate(s.domain, s.problem, s.plan);
    reply(res, 200, json::to_json(s.report), entry->revision);
    entry->session = std::move(s);
  }

  // Caller holds the entry lock.
  static const Session& session_of(const Entry& e) {
    if (!e.session || e.session->revision != e.revision) {
      throw HttpError{404, "NoReport", "validate a plan against the current revision first"};
    }
    return *e.session;
  }

  void state(const httplib::Request& req, httplib::Response& res) {
    auto entry = find(req.matches[1]);
    std::shared_lock lock(entry->mu);
    const std::string digits = req.matches[2];
    std::size_t k = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc{} || end != digits.data() + digits.size()) {
      throw HttpError{400, "MalformedPayload", "state index out of range"};
    }
    reply(res, 200, json::to_json(val::state_at(session_of(*entry).report, k)), entry->revision);
  }

  void links(const httplib::Request& req, httplib::Response& res) {
    auto entry = find(req.matches[1]);
    std::shared_lock lock(entry->mu);
    reply(res, 200, json::to_json(session_of(*entry).report.links), entry->revision);
  }

  void advise(const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    auto entry = find(req.matches[1]);
    std::unique_lock lock(entry->mu);
    check_revision(body, *entry, false);
    session_of(*entry);
    auto& s = *entry->session;
    s.advice = repair::advise(s.domain, s.problem, s.plan, s.report);
    reply(res, 200, json::to_json(*s.advice), entry->revision);
  }

  void apply(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const Json body = parse_body(req);
    const auto choice = json::choice_from_json(body);
    auto entry = find(id);
    std::unique_lock lock(entry->mu);
    check_revision(body, *entry, true);
    const auto& s = session_of(*entry);
    if (!s.advice) throw HttpError{404, "NoAdvice", "request repair advice first"};
    const auto result = repair::apply_advice(s.domain, *s.advice, choice);
    std::optional<pddl::Plan> augmented;
    if (result.achiever_name) augmented = repair::insert_achiever(s.plan, *s.advice, *result.achiever_name);
    Json doc = repair_document(result, augmented);
    const auto rev = commit(id, *entry, with_operators(entry->project, result.domain));
    doc["revision"] = rev;
    reply(res, 200, doc, rev);
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() {
  stop();
}

bool Service::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->bound_port = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    impl_->bound_port = port;
  }
  return impl_->bound_port > 0;
}

int Service::port() const { return impl_->bound_port; }

void Service::listen() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

}  // namespace pddlwb::app
