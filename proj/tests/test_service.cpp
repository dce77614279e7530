#include <filesystem>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "doctest.h"
#include "httplib.h"
#include "pddlwb/app/cli.hpp"
#include "pddlwb/app/service.hpp"
#include "pddlwb/serialize.hpp"
#include "support.hpp"

using pddlwb::json::Json;
using testing::fixture_path;
using testing::read_fixture;

namespace {

class Running {
 public:
  explicit Running(pddlwb::app::ServiceConfig config = {}) : service_(std::move(config)) {
    REQUIRE(service_.bind("127.0.0.1", 0));
    thread_ = std::thread([this] { service_.listen(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", service_.port());
    for (int i = 0; i < 200 && !client_->Get("/kb/complete"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ~Running() {
    service_.stop();
    thread_.join();
  }
  httplib::Client& http() { return *client_; }

 private:
  pddlwb::app::Service service_;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

httplib::Result post(httplib::Client& c, const std::string& path, const Json& body) {
  return c.Post(path, body.dump(), "application/json");
}

Json put_d1(httplib::Client& c, const std::string& id, const char* domain = "d1.pddl") {
  auto r = c.Put("/projects/" + id,
                 Json{{"domain", read_fixture(domain)}, {"problems", {read_fixture("p1.pddl")}}}.dump(),
                 "application/json");
  REQUIRE(r);
  REQUIRE(r->status == 201);
  return Json::parse(r->body);
}

std::string cli_json(std::vector<std::string> args) {
  args.push_back("--format");
  args.push_back("json");
  std::ostringstream out;
  std::ostringstream err;
  pddlwb::app::run_cli(args, out, err);
  return out.str();
}

std::string fx(const char* name) { return fixture_path(name).string(); }

}  // namespace

TEST_CASE("project lifecycle") {
  Running s;
  auto& c = s.http();
  const auto created = put_d1(c, "demo");
  CHECK(created["revision"] == 1);
  CHECK(created["diagnostics"].empty());

  auto got = c.Get("/projects/demo");
  REQUIRE(got);
  CHECK(got->status == 200);
  CHECK(got->get_header_value("X-Revision") == "1");
  const auto doc = Json::parse(got->body);
  CHECK(doc["name"] == "minilog");

  // PUT of the returned document round-trips.
  auto again = c.Put("/projects/demo", Json{{"revision", 1}, {"project", doc}}.dump(), "application/json");
  REQUIRE(again);
  CHECK(again->status == 200);
  CHECK(c.Get("/projects/demo")->body == got->body);

  CHECK(c.Get("/projects/nothing")->status == 404);
  CHECK(c.Put("/projects/demo", Json{{"project", doc}}.dump(), "application/json")->status == 409);
  CHECK(c.Put("/projects/demo", "{not json", "application/json")->status == 400);
}

TEST_CASE("edits, dangling references and revision conflicts") {
  Running s;
  auto& c = s.http();
  put_d1(c, "p");
  const Json edit{{"kind", "RemovePredicate"}, {"name", "in"}, {"arity", 2}};
  auto r = post(c, "/projects/p/edits", {{"revision", 1}, {"edit", edit}});
  REQUIRE(r);
  CHECK(r->status == 200);
  const auto body = Json::parse(r->body);
  CHECK(body["revision"] == 2);
  CHECK(body["diagnostics"].size() == 4);

  CHECK(post(c, "/projects/p/edits", {{"revision", 1}, {"edit", edit}})->status == 409);
  CHECK(post(c, "/projects/p/edits", {{"edit", edit}})->status == 400);
  CHECK(post(c, "/projects/p/edits", {{"revision", 2}, {"edit", {{"kind", "Teleport"}}}})->status == 400);
  CHECK(post(c, "/projects/p/edits", {{"revision", 2}, {"edit", {{"kind", "RemoveClass"}, {"name", "ghost"}}}})->status ==
        400);
  CHECK(post(c, "/projects/p/check", {{"revision", 2}})->status == 200);
  CHECK(post(c, "/projects/p/validate", {{"revision", 1}, {"plan", read_fixture("pl1.txt")}})->status == 409);
}

TEST_CASE("knowledge base completion") {
  Running s;
  auto r = s.http().Get("/kb/complete?kind=predicate&prefix=at");
  REQUIRE(r);
  CHECK(Json::parse(r->body) == Json::array({"at physobj place"}));
  CHECK(s.http().Get("/kb/complete?kind=verb&prefix=at")->status == 400);
}

TEST_CASE("validate, inspect and repair over HTTP") {
  Running s;
  auto& c = s.http();
  put_d1(c, "broken", "d1b.pddl");
  CHECK(c.Get("/projects/broken/report/links")->status == 404);

  auto v = post(c, "/projects/broken/validate", {{"plan", read_fixture("pl1.txt")}});
  REQUIRE(v);
  const auto report = Json::parse(v->body);
  CHECK(report["flaw"]["stepIndex"] == 3);
  CHECK(Json::parse(c.Get("/projects/broken/report/state/2")->body) == Json::array({"(at trk b)"}));
  CHECK(c.Get("/projects/broken/report/state/3")->status == 400);

  auto advice = post(c, "/projects/broken/repair/advise", Json::object());
  REQUIRE(advice);
  CHECK(Json::parse(advice->body)["optionA"]["action"]["name"] == "achieve-in");

  auto applied = post(c, "/projects/broken/repair/apply", {{"revision", 1}, {"option", "A"}});
  REQUIRE(applied);
  REQUIRE(applied->status == 200);
  const auto result = Json::parse(applied->body);
  CHECK(result["revision"] == 2);
  CHECK(result["achiever"] == "achieve-in");

  // The old report is gone with the old revision.
  CHECK(c.Get("/projects/broken/report/links")->status == 404);
  auto revalidated = post(c, "/projects/broken/validate", {{"revision", 2}, {"plan", result["plan"]}});
  REQUIRE(revalidated);
  const auto second = Json::parse(revalidated->body);
  CHECK(second["valid"] == true);
  for (const auto& step : second["steps"]) CHECK(step["applicable"] == true);
}

TEST_CASE("option B over HTTP restores D1") {
  Running s;
  auto& c = s.http();
  put_d1(c, "b", "d1b.pddl");
  post(c, "/projects/b/validate", {{"plan", read_fixture("pl1.txt")}});
  const auto advice = Json::parse(post(c, "/projects/b/repair/advise", Json::object())->body);
  REQUIRE(advice["optionB"][0]["kind"] == "AddEffectToEarlierStep");
  auto r = post(c, "/projects/b/repair/apply", {{"revision", 1}, {"option", "B"}, {"index", 0}});
  REQUIRE(r->status == 200);
  const auto exported = Json::parse(post(c, "/projects/b/export/pddl", Json::object())->body);
  CHECK(pddlwb::pddl::parse_domain(exported["domain"].get<std::string>()) == testing::d1());
  CHECK(post(c, "/projects/b/repair/apply", {{"revision", 2}, {"option", "C"}})->status == 400);
}

TEST_CASE("CLI and service emit identical JSON") {
  Running s;
  auto& c = s.http();
  put_d1(c, "same", "d1b.pddl");
  const std::vector<std::string> inputs{"--domain", fx("d1b.pddl"), "--problem", fx("p1.pddl")};
  auto with = [&](std::vector<std::string> head, std::vector<std::string> tail = {}) {
    head.insert(head.end(), inputs.begin(), inputs.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return cli_json(head);
  };
  const std::vector<std::string> plan{"--plan", fx("pl1.txt")};

  CHECK(post(c, "/projects/same/check", Json::object())->body == with({"check"}));
  CHECK(post(c, "/projects/same/validate", {{"plan", read_fixture("pl1.txt")}})->body == with({"validate"}, plan));
  CHECK(c.Get("/projects/same/report/links")->body == with({"links"}, plan));
  CHECK(c.Get("/projects/same/report/state/2")->body == with({"state", "--at", "2"}, plan));
  CHECK(post(c, "/projects/same/repair/advise", Json::object())->body == with({"repair", "--advise"}, plan));
  CHECK(post(c, "/projects/same/export/pddl", {{"problem", "p1"}})->body == with({"export", "pddl"}));
  CHECK(post(c, "/projects/same/plan", Json::object())->status == 400);  // D1b cannot reach the goal
}

TEST_CASE("builtin and external planners") {
  pddlwb::app::ServiceConfig config;
  config.plugins = pddlwb::planner::load_plugins(
      R"([{"name": "stub", "command": ")" + fx("stub_planner.sh") + R"( {domain} {problem}"},
          {"name": "sleepy", "command": ")" + fx("stub_sleeper.sh") + R"( {domain} {problem}", "timeoutSeconds": 0.3}])");
  Running s(config);
  auto& c = s.http();
  put_d1(c, "plan");
  auto bfs = post(c, "/projects/plan/plan", Json::object());
  REQUIRE(bfs->status == 200);
  CHECK(bfs->body == cli_json({"plan", "--builtin-bfs", "--domain", fx("d1.pddl"), "--problem", fx("p1.pddl")}));

  auto poll = [&](const std::string& planner) {
    auto r = post(c, "/projects/plan/plan", {{"planner", planner}});
    REQUIRE(r->status == 202);
    const std::string id = Json::parse(r->body)["job"];
    for (int i = 0; i < 400; ++i) {
      const auto doc = Json::parse(c.Get("/jobs/" + id)->body);
      if (doc["status"] != "running") return doc;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    FAIL("job did not finish");
    return Json{};
  };
  const auto done = poll("stub");
  CHECK(done["status"] == "done");
  CHECK(done["plan"]["steps"].size() == 3);
  const auto slow = poll("sleepy");
  CHECK(slow["status"] == "failed");
  CHECK(slow["error"]["code"] == "TimeoutError");
  CHECK(c.Get("/jobs/job-999")->status == 404);
}

TEST_CASE("concurrent conflicting mutations cannot both win") {
  Running s;
  put_d1(s.http(), "race");
  std::atomic<int> ok{0};
  std::atomic<int> conflict{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", s.http().port());
      const Json edit{{"kind", "DeclareClass"}, {"name", "c" + std::to_string(i)}, {"parent", "object"}};
      auto r = post(c, "/projects/race/edits", {{"revision", 1}, {"edit", edit}});
      if (r && r->status == 200) ++ok;
      if (r && r->status == 409) ++conflict;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(ok == 1);
  CHECK(conflict == 7);
}

TEST_CASE("state is rebuilt from snapshots") {
  const auto dir = std::filesystem::temp_directory_path() / ("pddlwb-svc-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  pddlwb::app::ServiceConfig config;
  config.data_dir = dir.string();
  std::string before;
  {
    Running s(config);
    put_d1(s.http(), "kept");
    post(s.http(), "/projects/kept/edits",
         {{"revision", 1}, {"edit", {{"kind", "RemovePredicate"}, {"name", "in"}, {"arity", 2}}}});
    before = s.http().Get("/projects/kept")->body;
  }
  CHECK(std::filesystem::exists(dir / "kept.kavi.xml"));
  {
    Running s(config);
    auto r = s.http().Get("/projects/kept");
    REQUIRE(r);
    CHECK(r->body == before);
    CHECK(Json::parse(post(s.http(), "/projects/kept/check", Json::object())->body).size() == 4);
  }
  std::filesystem::remove_all(dir);
}
