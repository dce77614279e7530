#include <random>

#include "doctest.h"
#include "pddlwb/error.hpp"
#include "pddlwb/pddl.hpp"
#include "pddlwb/sexpr.hpp"
#include "support.hpp"

using namespace pddlwb;
using namespace pddlwb::pddl;
using testing::atom;
using testing::read_fixture;

namespace {

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

TEST_CASE("sexpr reader") {
  auto nodes = sexpr::read_all("(A ; comment\n (b C))");
  REQUIRE(nodes.size() == 1);
  CHECK(nodes[0].head_is("a"));
  CHECK(nodes[0].children[1].children[1].symbol == "c");
  CHECK(nodes[0].children[1].where.line == 2);
  CHECK(code_of([] { sexpr::read_all("(a (b)"); }) == Errc::UnbalancedParens);
  CHECK(code_of([] { sexpr::read_all("a)"); }) == Errc::UnbalancedParens);
}

TEST_CASE("D1 parses to the expected structure") {
  const auto d = testing::d1();
  CHECK(d.name == "minilog");
  CHECK(d.actions.size() == 3);
  CHECK(d.predicates.size() == 2);
  CHECK(d.types.entries().size() == 5);
  CHECK(d.types.parent_of("package") == "physobj");
  CHECK(d.types.parent_of("physobj") == "object");
  CHECK(d.requirements.has(Requirement::NegativePreconditions));

  const auto* load = d.find_action("load");
  REQUIRE(load != nullptr);
  CHECK(load->params == std::vector<TypedName>{{"?pkg", "package"}, {"?trk", "truck"}, {"?loc", "location"}});
  CHECK(load->preconditions == std::vector<Literal>{{true, atom("at", {"?pkg", "?loc"})},
                                                    {true, atom("at", {"?trk", "?loc"})},
                                                    {false, atom("in", {"?pkg", "?trk"})}});
  CHECK(load->effects == std::vector<Literal>{{true, atom("in", {"?pkg", "?trk"})},
                                              {false, atom("at", {"?pkg", "?loc"})}});
}

TEST_CASE("P1 and PL1 parse") {
  const auto p = testing::p1();
  CHECK(p.name == "p1");
  CHECK(p.domain_name == "minilog");
  CHECK(p.objects.size() == 4);
  CHECK(p.init.size() == 2);
  CHECK(p.goal == std::vector<Literal>{{true, atom("at", {"pkg", "b"})}});

  const auto plan = testing::pl1();
  CHECK(plan.steps == std::vector<PlanStep>{{"load", {"pkg", "trk", "a"}},
                                             {"drive", {"trk", "a", "b"}},
                                             {"unload", {"pkg", "trk", "b"}}});
}

TEST_CASE("parser rejects constructs outside the subset") {
  const std::string head = "(define (domain x) (:requirements :strips) ";
  CHECK(code_of([&] { parse_domain("(define (domain x) (:requirements :fluents))"); }) ==
        Errc::UnsupportedRequirement);
  CHECK(code_of([&] { parse_domain(head + "(:functions (f)))"); }) == Errc::UnsupportedConstruct);
  CHECK(code_of([&] {
          parse_domain(head + "(:predicates (p) (q)) (:action a :parameters () "
                              ":precondition (or (p) (q)) :effect (p)))");
        }) == Errc::UnsupportedConstruct);
  CHECK(code_of([&] {
          parse_domain(head + "(:predicates (p)) (:action a :parameters () "
                              ":precondition (not (p)) :effect (p)))");
        }) == Errc::UnsupportedConstruct);
  CHECK(code_of([&] { parse_domain(head); }) == Errc::UnbalancedParens);
}

TEST_CASE("problem and plan errors") {
  CHECK(code_of([] {
          parse_problem("(define (problem p) (:domain d) (:objects a) (:init (p ?x)) (:goal (p a)))");
        }) == Errc::VariableInGroundContext);
  CHECK(code_of([] { parse_plan("(load pkg trk a)\n()\n"); }) == Errc::EmptyStep);
}

TEST_CASE("plan parsing ignores comments, step numbers and case") {
  const auto plain = testing::pl1();
  CHECK(parse_plan("; header\n0: (LOAD pkg TRK a) ; first\n1: (drive trk a b)\n\n2: (unload pkg trk b)\n") ==
        plain);
}

TEST_CASE("symbols are lowercased") {
  const auto d = parse_domain(
      "(DEFINE (DOMAIN Mixed) (:REQUIREMENTS :STRIPS) (:PREDICATES (Ready ?X)) "
      "(:ACTION Go :PARAMETERS (?X) :PRECONDITION (Ready ?X) :EFFECT (NOT (Ready ?X))))");
  CHECK(d.name == "mixed");
  CHECK(d.actions[0].name == "go");
  CHECK(d.actions[0].params[0].name == "?x");
  CHECK(d.predicates[0].name == "ready");
}

TEST_CASE("printed D1 carries the requirement subset") {
  const std::string out = print_domain(testing::d1());
  CHECK(out.find(":requirements :strips :typing :negative-preconditions") != std::string::npos);
}

TEST_CASE("round-trip fixpoint on every fixture") {
  for (const char* name : {"d1.pddl", "d1b.pddl", "blocks.pddl", "gripper.pddl", "switches.pddl"}) {
    CAPTURE(name);
    const auto d = parse_domain(read_fixture(name));
    const std::string printed = print_domain(d);
    CHECK(parse_domain(printed) == d);
    CHECK(print_domain(parse_domain(printed)) == printed);
  }
  for (const char* name : {"p1.pddl", "blocks-p1.pddl", "gripper-p1.pddl", "switches-p1.pddl"}) {
    CAPTURE(name);
    const auto p = parse_problem(read_fixture(name));
    CHECK(parse_problem(print_problem(p)) == p);
  }
  const auto plan = testing::pl1();
  CHECK(parse_plan(print_plan(plan)) == plan);
}

TEST_CASE("typed lists with explicit object survive printing") {
  const auto d = parse_domain(
      "(define (domain t) (:requirements :strips :typing) (:types t) "
      "(:predicates (p ?x - object ?y - t)))");
  CHECK(parse_domain(print_domain(d)) == d);
}

TEST_CASE("subtype relation on D1") {
  const auto d = testing::d1();
  CHECK(d.types.is_subtype("package", "physobj"));
  CHECK_FALSE(d.types.is_subtype("physobj", "package"));
  CHECK(d.types.is_subtype("location", "object"));
  CHECK(code_of([&] { d.types.is_subtype("boat", "object"); }) == Errc::UnknownType);

  // Partial order: reflexive, antisymmetric, transitive over all declared types.
  std::vector<std::string> names{"object"};
  for (const auto& [n, _] : d.types.entries()) names.push_back(n);
  for (const auto& a : names) {
    CHECK(d.types.is_subtype(a, a));
    for (const auto& b : names) {
      if (a != b && d.types.is_subtype(a, b)) CHECK_FALSE(d.types.is_subtype(b, a));
      for (const auto& c : names) {
        if (d.types.is_subtype(a, b) && d.types.is_subtype(b, c)) CHECK(d.types.is_subtype(a, c));
      }
    }
  }
}

TEST_CASE("type hierarchy rejects cycles and double parents") {
  CHECK(code_of([] { parse_domain("(define (domain t) (:requirements :typing) (:types a - b b - a))"); }) ==
        Errc::MalformedSection);
  CHECK(code_of([] { parse_domain("(define (domain t) (:requirements :typing) (:types a - b a - c))"); }) ==
        Errc::MalformedSection);
}

TEST_CASE("plan parsing is insensitive to inserted comments and blank lines") {
  std::mt19937 rng(7);
  const auto plan = testing::pl1();
  const std::vector<std::string> lines{"(load pkg trk a)", "(drive trk a b)", "(unload pkg trk b)"};
  const std::vector<std::string> noise{"", "; note", "   ", ";;; (fake step)"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    for (const auto& l : lines) {
      for (int k = static_cast<int>(rng() % 3); k > 0; --k) text += noise[rng() % noise.size()] + "\n";
      text += l;
      if (rng() % 2) text += " ; trailing";
      text += "\n";
    }
    CHECK(parse_plan(text) == plan);
  }
}
