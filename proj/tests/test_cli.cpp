#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "pddlwb/app/cli.hpp"
#include "pddlwb/serialize.hpp"
#include "support.hpp"

using pddlwb::app::run_cli;
using testing::fixture_path;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const char* name) { return fixture_path(name).string(); }

class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("pddlwb-cli-" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace

TEST_CASE("check on the clean project") {
  TempDir tmp;
  const auto xml = tmp.file("d1.kavi.xml");
  REQUIRE(cli({"export", "xml", "--domain", fx("d1.pddl"), "--problem", fx("p1.pddl"), "--out", xml}).code == 0);
  const auto r = cli({"check", "--project", xml});
  CHECK(r.code == 0);
  CHECK(r.out == "0 diagnostics\n");
}

TEST_CASE("validate exit codes and JSON flaw") {
  const auto bad = cli({"validate", "--domain", fx("d1b.pddl"), "--problem", fx("p1.pddl"), "--plan", fx("pl1.txt"),
                        "--format", "json"});
  CHECK(bad.code == 1);
  const auto doc = pddlwb::json::Json::parse(bad.out);
  CHECK(doc["flaw"]["stepIndex"] == 3);
  CHECK(doc["flaw"]["unsatisfied"][0]["atom"] == "(in pkg trk)");
  CHECK(doc["valid"] == false);
  for (const char* key : {"states", "steps", "flaw", "goalSatisfied", "valid", "links"}) CHECK(doc.contains(key));

  const auto good = cli({"validate", "--domain", fx("d1.pddl"), "--problem", fx("p1.pddl"), "--plan", fx("pl1.txt")});
  CHECK(good.code == 0);
}

TEST_CASE("repair apply A then validate") {
  TempDir tmp;
  const auto domain = tmp.file("fixed.pddl");
  const auto plan = tmp.file("augmented.txt");
  const auto r = cli({"repair", "--apply", "A", "--domain", fx("d1b.pddl"), "--problem", fx("p1.pddl"), "--plan",
                      fx("pl1.txt"), "--out", domain, "--plan-out", plan});
  CHECK(r.code == 0);
  CHECK(cli({"validate", "--domain", domain, "--problem", fx("p1.pddl"), "--plan", plan}).code == 0);

  const auto b = cli({"repair", "--apply", "B:0", "--domain", fx("d1b.pddl"), "--problem", fx("p1.pddl"), "--plan",
                      fx("pl1.txt"), "--out", domain});
  CHECK(b.code == 0);
  CHECK(pddlwb::pddl::parse_domain(testing::read_fixture("d1.pddl")) ==
        pddlwb::pddl::parse_domain([&] {
          std::ifstream in(domain);
          std::stringstream ss;
          ss << in.rdbuf();
          return ss.str();
        }()));
}

TEST_CASE("repair on a valid plan is a domain-level failure") {
  const auto r = cli({"repair", "--advise", "--domain", fx("d1.pddl"), "--problem", fx("p1.pddl"), "--plan",
                      fx("pl1.txt")});
  CHECK(r.code == 1);
  CHECK(r.err.find("NoFlaw") != std::string::npos);
}

TEST_CASE("plan, links and state") {
  const auto p = cli({"plan", "--builtin-bfs", "--domain", fx("d1.pddl"), "--problem", fx("p1.pddl")});
  CHECK(p.code == 0);
  CHECK(p.out == testing::read_fixture("pl1.txt"));

  const std::string plugins = R"([{"name": "stub", "command": ")" + fx("stub_planner.sh") + R"( {domain} {problem}"}])";
  TempDir tmp;
  std::ofstream(tmp.file("plugins.json")) << plugins;
  const auto ext = cli({"plan", "--planner", "stub", "--plugins", tmp.file("plugins.json"), "--domain", fx("d1.pddl"),
                        "--problem", fx("p1.pddl")});
  CHECK(ext.code == 0);
  CHECK(ext.out == p.out);

  const auto links = cli({"links", "--domain", fx("d1.pddl"), "--problem", fx("p1.pddl"), "--plan", fx("pl1.txt")});
  CHECK(links.code == 0);
  CHECK(std::count(links.out.begin(), links.out.end(), '\n') == 6);

  const auto s = cli({"state", "--at", "2", "--domain", fx("d1.pddl"), "--problem", fx("p1.pddl"), "--plan", fx("pl1.txt")});
  CHECK(s.out == "(at trk b)\n(in pkg trk)\n");
  const auto beyond = cli({"state", "--at", "3", "--domain", fx("d1b.pddl"), "--problem", fx("p1.pddl"), "--plan",
                           fx("pl1.txt")});
  CHECK(beyond.code == 1);
}

TEST_CASE("usage and IO errors exit with 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"check", "--domain", "/nonexistent.pddl"}).code == 2);
  CHECK(cli({"validate", "--domain", fx("d1.pddl"), "--problem", fx("p1.pddl"), "--plan", fx("pl1.txt"), "--format",
             "yaml"})
            .code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("completion") {
  const auto r = cli({"complete", "--prefix", "at"});
  CHECK(r.out == "at physobj place\n");
}

TEST_CASE("export pddl round-trips through the project format") {
  TempDir tmp;
  const auto xml = tmp.file("p.kavi.xml");
  REQUIRE(cli({"export", "xml", "--domain", fx("d1.pddl"), "--problem", fx("p1.pddl"), "--out", xml}).code == 0);
  const auto r = cli({"export", "pddl", "--project", xml, "--problem", "p1", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto doc = pddlwb::json::Json::parse(r.out);
  CHECK(pddlwb::pddl::parse_domain(doc["domain"].get<std::string>()) == testing::d1());
  CHECK(pddlwb::pddl::parse_problem(doc["problem"].get<std::string>()) == testing::p1());
}
