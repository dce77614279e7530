#include <random>

#include "doctest.h"
#include "pddlwb/error.hpp"
#include "pddlwb/workspace.hpp"
#include "support.hpp"

using namespace pddlwb;
using namespace pddlwb::ws;
using testing::atom;

namespace {

Project d1_project() { return project_from_pddl(testing::d1(), {testing::p1()}); }

std::size_t count_code(const std::vector<Diagnostic>& ds, DiagCode code) {
  return static_cast<std::size_t>(
      std::count_if(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.code == code; }));
}

// Independent usage census: literal occurrences of `pred` in operators and problems.
std::size_t usages(const Project& p, const std::string& pred) {
  std::size_t n = 0;
  auto scan = [&](const std::vector<pddl::Literal>& lits) {
    for (const auto& l : lits) n += l.atom.predicate == pred;
  };
  for (const auto& op : p.operators) {
    scan(op.preconditions);
    scan(op.effects);
  }
  for (const auto& pr : p.problems) {
    for (const auto& a : pr.init) n += a.predicate == pred;
    scan(pr.goal);
  }
  return n;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::IoError;
}

}  // namespace

TEST_CASE("empty project") {
  const auto p = new_project("demo");
  CHECK(p.language.predicates.empty());
  CHECK(p.operators.empty());
  CHECK(p.problems.empty());
  CHECK(check_consistency(p).empty());
  CHECK(code_of([&] { export_pddl(p); }) == Errc::NoDomainContent);
}

TEST_CASE("D1+P1 project is consistent") {
  const auto p = d1_project();
  CHECK(check_consistency(p).empty());
  CHECK(p.language.classes.size() == 5);
}

TEST_CASE("removing `in` leaves four dangling references") {
  const auto r = apply_edit(d1_project(), edit::RemovePredicate{"in", 2});
  CHECK(r.project.language.predicates.size() == 1);
  CHECK(r.diagnostics.size() == 4);
  CHECK(count_code(r.diagnostics, DiagCode::DanglingReference) == 4);
  std::vector<std::string> owners;
  for (const auto& d : r.diagnostics) owners.push_back(d.locus.owner);
  CHECK(owners == std::vector<std::string>{"load", "load", "unload", "unload"});
  for (const auto& d : r.diagnostics) CHECK(d.locus.level == Level::Operators);
}

TEST_CASE("dangling census equals independent usage count") {
  const std::vector<std::pair<std::string, std::string>> fixtures{
      {"d1.pddl", "p1.pddl"}, {"blocks.pddl", "blocks-p1.pddl"},
      {"gripper.pddl", "gripper-p1.pddl"}, {"switches.pddl", "switches-p1.pddl"}};
  for (const auto& [dom, prob] : fixtures) {
    const auto p = project_from_pddl(pddl::parse_domain(testing::read_fixture(dom)),
                                     {pddl::parse_problem(testing::read_fixture(prob))});
    for (const auto& decl : p.language.predicates) {
      CAPTURE(decl.name);
      const auto r = apply_edit(p, edit::RemovePredicate{decl.name, decl.arity()});
      CHECK(count_code(r.diagnostics, DiagCode::DanglingReference) == usages(p, decl.name));
    }
  }
}

TEST_CASE("redeclaring a removed predicate clears the dangling references") {
  const auto removed = apply_edit(d1_project(), edit::RemovePredicate{"in", 2}).project;
  const auto back = apply_edit(
      removed, edit::DeclarePredicate{{"in", {{"?pkg", "package"}, {"?trk", "truck"}}}});
  CHECK(back.diagnostics.empty());
}

TEST_CASE("declaring a class twice") {
  const auto once = apply_edit(new_project("x"), edit::DeclareClass{"physobj", "object"});
  const auto a = apply_edit(once.project, edit::DeclareClass{"package", "physobj"});
  CHECK(a.diagnostics.empty());
  const auto b = apply_edit(a.project, edit::DeclareClass{"package", "physobj"});
  CHECK(count_code(b.diagnostics, DiagCode::DuplicateDeclaration) == 1);
}

TEST_CASE("removing or renaming a missing name") {
  CHECK(code_of([] { apply_edit(new_project("x"), edit::RemoveClass{"ghost"}); }) == Errc::UnknownTarget);
  CHECK(code_of([] { apply_edit(d1_project(), edit::RemovePredicate{"in", 3}); }) == Errc::UnknownTarget);
  CHECK(code_of([] {
          apply_edit(d1_project(), edit::RenameSymbol{SymbolKind::Operator, "fly", "x"});
        }) == Errc::UnknownTarget);
}

TEST_CASE("rename is reference-complete") {
  const auto before = d1_project();
  const auto r = apply_edit(before, edit::RenameSymbol{SymbolKind::Predicate, "at", "located"});
  CHECK(usages(r.project, "at") == 0);
  CHECK(usages(r.project, "located") == usages(before, "at"));
  CHECK(r.diagnostics.size() == check_consistency(before).size());

  const auto c = apply_edit(before, edit::RenameSymbol{SymbolKind::Class, "package", "parcel"});
  CHECK(c.diagnostics.empty());
  CHECK(c.project.problems[0].objects[0].type == "parcel");
}

TEST_CASE("arity and binding defects") {
  auto op = *testing::d1().find_action("load");
  op.preconditions[0] = {true, atom("at", {"?pkg"})};
  const auto r = apply_edit(d1_project(), edit::UpsertOperator{op});
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].code == DiagCode::ArityMismatch);
  CHECK(r.diagnostics[0].locus.level == Level::Operators);
  CHECK(r.diagnostics[0].locus.owner == "load");

  auto ghost = *testing::d1().find_action("drive");
  ghost.preconditions.push_back({true, atom("at", {"?ghost", "?from"})});
  const auto g = apply_edit(d1_project(), edit::UpsertOperator{ghost});
  REQUIRE(g.diagnostics.size() == 1);
  CHECK(g.diagnostics[0].code == DiagCode::UnboundVariable);
}

TEST_CASE("contradictory effects are warnings and do not block export") {
  auto op = *testing::d1().find_action("drive");
  op.effects.push_back({false, atom("at", {"?trk", "?to"})});
  const auto r = apply_edit(d1_project(), edit::UpsertOperator{op});
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].severity == Severity::Warning);
  CHECK(r.diagnostics[0].code == DiagCode::ContradictoryEffect);
  CHECK_NOTHROW(export_pddl(r.project));
}

TEST_CASE("export refuses on errors") {
  auto op = *testing::d1().find_action("load");
  op.preconditions[0] = {true, atom("at", {"?pkg"})};
  const auto r = apply_edit(d1_project(), edit::UpsertOperator{op});
  CHECK(code_of([&] { export_pddl(r.project); }) == Errc::RefusedOnErrors);
  CHECK(code_of([] { export_pddl(d1_project(), "p9"); }) == Errc::UnknownProblem);
}

TEST_CASE("PDDL export re-parses to the fixtures") {
  const auto out = export_pddl(d1_project(), "p1");
  CHECK(pddl::parse_domain(out.domain) == testing::d1());
  REQUIRE(out.problem.has_value());
  CHECK(pddl::parse_problem(*out.problem) == testing::p1());

  const auto fresh = project_from_pddl(pddl::parse_domain(out.domain), {pddl::parse_problem(*out.problem)});
  CHECK_FALSE(has_errors(check_consistency(fresh)));
}

TEST_CASE("requirements are derived from content") {
  auto p = project_from_pddl(pddl::parse_domain(testing::read_fixture("blocks.pddl")));
  CHECK(derive_requirements(p).flags == std::vector<pddl::Requirement>{pddl::Requirement::Strips});
  auto g = project_from_pddl(pddl::parse_domain(testing::read_fixture("gripper.pddl")));
  CHECK(derive_requirements(g).flags ==
        std::vector<pddl::Requirement>{pddl::Requirement::Strips, pddl::Requirement::Typing});
  CHECK(derive_requirements(d1_project()).has(pddl::Requirement::NegativePreconditions));
}

TEST_CASE("XML round-trip") {
  const auto p = d1_project();
  CHECK(import_xml(export_xml(p)) == p);
  CHECK(export_xml(import_xml(export_xml(p))) == export_xml(p));
  CHECK(export_xml(p).find("<kaviProject") != std::string::npos);

  auto op = *testing::d1().find_action("load");
  op.preconditions[0] = {true, atom("at", {"?pkg"})};
  const auto broken = apply_edit(p, edit::UpsertOperator{op});
  const auto back = import_xml(export_xml(broken.project));
  CHECK(back == broken.project);
  CHECK(check_consistency(back) == broken.diagnostics);

  const auto removed = apply_edit(p, edit::RemovePredicate{"in", 2}).project;
  CHECK(check_consistency(import_xml(export_xml(removed))) == check_consistency(removed));
}

TEST_CASE("XML schema violations") {
  CHECK(code_of([] { import_xml("<other/>"); }) == Errc::SchemaViolation);
  CHECK(code_of([] { import_xml("<kaviProject version=\"2\" name=\"x\"/>"); }) == Errc::UnsupportedVersion);
  CHECK(code_of([] { import_xml("<kaviProject version=\"1\" name=\"x\" colour=\"red\"/>"); }) ==
        Errc::SchemaViolation);
  CHECK(code_of([] { import_xml("<kaviProject version=\"1\""); }) == Errc::SchemaViolation);
  try {
    import_xml(
        "<kaviProject version=\"1\" name=\"x\"><operators><operator name=\"a\" bogus=\"1\"/>"
        "</operators></kaviProject>");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("operator") != std::string::npos);
  }
}

TEST_CASE("random edit sequences stay representable and deterministic") {
  std::mt19937 rng(1234);
  const std::vector<std::string> names{"at", "in", "load", "drive", "package", "truck", "p1", "ghost"};
  const std::vector<std::string> types{"object", "physobj", "place", "package", "cargo"};
  const auto d = testing::d1();
  for (int run = 0; run < 40; ++run) {
    Project p = d1_project();
    for (int step = 0; step < 15; ++step) {
      const std::string& n = names[rng() % names.size()];
      Edit e;
      switch (rng() % 7) {
        case 0: e = edit::DeclareClass{n, types[rng() % types.size()]}; break;
        case 1: e = edit::RemoveClass{n}; break;
        case 2: e = edit::RemovePredicate{n, rng() % 3}; break;
        case 3: e = edit::DeclarePredicate{{n, {{"?a", types[rng() % types.size()]}}}}; break;
        case 4: e = edit::UpsertOperator{d.actions[rng() % d.actions.size()]}; break;
        case 5: e = edit::RemoveOperator{n}; break;
        default:
          e = edit::RenameSymbol{static_cast<SymbolKind>(rng() % 4), n, names[rng() % names.size()] + "2"};
      }
      try {
        p = apply_edit(p, e).project;
      } catch (const Error& err) {
        CHECK(err.code() == Errc::UnknownTarget);
      }
      const auto xml = export_xml(p);
      CHECK(import_xml(xml) == p);
      CHECK(check_consistency(p) == check_consistency(p));
    }
  }
}
