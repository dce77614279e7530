#include <map>
#include <random>

#include "doctest.h"
#include "mutations.hpp"
#include "pddlwb/error.hpp"
#include "pddlwb/repair.hpp"
#include "support.hpp"

using namespace pddlwb;
using namespace pddlwb::repair;
using testing::atom;

namespace {

RepairAdvice d1b_advice() {
  const auto d = testing::d1b();
  const auto p = testing::p1();
  const auto plan = testing::pl1();
  return advise(d, p, plan, val::validate(d, p, plan));
}

std::optional<std::size_t> index_of(const RepairAdvice& a, ModificationKind kind, const std::string& op,
                                    const pddl::Literal& change) {
  for (std::size_t i = 0; i < a.option_b.size(); ++i) {
    const auto& m = a.option_b[i];
    if (m.kind == kind && m.target_operator == op && m.change == change) return i;
  }
  return std::nullopt;
}

pddl::Atom substitute(const pddl::Atom& lifted, const pddl::OperatorSchema& op, const pddl::PlanStep& step) {
  std::map<std::string, std::string> sigma;
  for (std::size_t i = 0; i < op.params.size(); ++i) sigma[op.params[i].name] = step.args[i];
  pddl::Atom out{lifted.predicate, {}};
  for (const auto& t : lifted.args) out.args.push_back(sigma.count(t) ? sigma[t] : t);
  return out;
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

TEST_CASE("advice for the D1b flaw") {
  const auto a = d1b_advice();
  REQUIRE(a.flaw.has_value());
  CHECK(a.insert_before == 3);
  CHECK(a.option_a.action.name == "achieve-in");
  CHECK(a.option_a.action.params == std::vector<pddl::TypedName>{{"?x1", "package"}, {"?x2", "truck"}});
  CHECK(a.option_a.action.preconditions.empty());
  CHECK(a.option_a.action.effects == std::vector<pddl::Literal>{{true, atom("in", {"?x1", "?x2"})}});
  CHECK(a.option_a.instance == pddl::PlanStep{"achieve-in", {"pkg", "trk"}});

  const auto add = index_of(a, ModificationKind::AddEffectToEarlierStep, "load", {true, atom("in", {"?pkg", "?trk"})});
  REQUIRE(add.has_value());
  CHECK(a.option_b[*add].source_step == std::optional<std::size_t>{1});
  CHECK(index_of(a, ModificationKind::RemovePrecondition, "unload", {true, atom("in", {"?pkg", "?trk"})}));
  CHECK(a.advice_text.find("achieve-in") != std::string::npos);
}

TEST_CASE("option A closes the flaw") {
  const auto a = d1b_advice();
  const auto r = apply_advice(testing::d1b(), a, ChooseA{});
  CHECK(r.domain.actions.size() == 4);
  REQUIRE(r.achiever_name.has_value());
  CHECK(*r.achiever_name == "achieve-in");
  CHECK(r.diagnostics.empty());
  const auto plan = insert_achiever(testing::pl1(), a, *r.achiever_name);
  CHECK(plan.steps.size() == 4);
  CHECK(plan.steps[2] == pddl::PlanStep{"achieve-in", {"pkg", "trk"}});
  CHECK(val::validate(r.domain, testing::p1(), plan).valid);

  // A second application picks a fresh name.
  const auto again = apply_advice(r.domain, a, ChooseA{});
  CHECK(*again.achiever_name == "achieve-in-2");
}

TEST_CASE("option B restores D1") {
  const auto a = d1b_advice();
  const auto add = index_of(a, ModificationKind::AddEffectToEarlierStep, "load", {true, atom("in", {"?pkg", "?trk"})});
  REQUIRE(add.has_value());
  const auto r = apply_advice(testing::d1b(), a, ChooseB{*add});
  CHECK(r.domain == testing::d1());
  CHECK(val::validate(r.domain, testing::p1(), testing::pl1()).valid);
}

TEST_CASE("apply errors") {
  const auto a = d1b_advice();
  CHECK(code_of([&] { apply_advice(testing::d1b(), a, ChooseB{a.option_b.size()}); }) == Errc::UnknownChoice);
  auto without_load = testing::d1b();
  std::erase_if(without_load.actions, [](const auto& op) { return op.name == "load"; });
  const auto add = index_of(a, ModificationKind::AddEffectToEarlierStep, "load", {true, atom("in", {"?pkg", "?trk"})});
  CHECK(code_of([&] { apply_advice(without_load, a, ChooseB{*add}); }) == Errc::StaleAdvice);

  const auto d = testing::d1();
  const auto p = testing::p1();
  const auto plan = testing::pl1();
  CHECK(code_of([&] { advise(d, p, plan, val::validate(d, p, plan)); }) == Errc::NoFlaw);
}

TEST_CASE("unexpectedly-present flaws get a forbid action") {
  const auto d = testing::d1();
  auto p = testing::p1();
  p.init.push_back(atom("in", {"pkg", "trk"}));
  const pddl::Plan plan{{{"load", {"pkg", "trk", "a"}}}};
  const auto r = val::validate(d, p, plan);
  REQUIRE(r.flaw.has_value());
  REQUIRE(r.flaw->unsatisfied.size() == 1);
  const auto a = advise(d, p, plan, r);
  CHECK(a.option_a.action.name == "forbid-in");
  CHECK(a.option_a.action.effects == std::vector<pddl::Literal>{{false, atom("in", {"?x1", "?x2"})}});
}

TEST_CASE("goal failures get advice too") {
  auto d = testing::d1();
  for (auto& op : d.actions) {
    if (op.name == "unload") std::erase_if(op.effects, [](const auto& l) { return l.positive; });
  }
  const auto p = testing::p1();
  const auto plan = testing::pl1();
  const auto r = val::validate(d, p, plan);
  REQUIRE_FALSE(r.flaw.has_value());
  REQUIRE(r.goal_satisfied == std::optional<bool>{false});
  const auto a = advise(d, p, plan, r);
  CHECK_FALSE(a.flaw.has_value());
  CHECK(a.insert_before == 4);
  CHECK(a.option_a.action.name == "achieve-at");
  CHECK(index_of(a, ModificationKind::AddEffectToEarlierStep, "unload", {true, atom("at", {"?pkg", "?loc"})}));

  const auto fixed = apply_advice(d, a, ChooseA{});
  CHECK(val::validate(fixed.domain, p, insert_achiever(plan, a, *fixed.achiever_name)).valid);
}

TEST_CASE("repair properties over mutated D1") {
  std::mt19937 rng(77);
  const auto base = testing::d1();
  const auto p = testing::p1();
  const auto& pool = testing::p1_steps();
  int flaws = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const auto d = testing::mutate_d1(base, rng);
    pddl::Plan plan = testing::pl1();
    if (trial % 3 == 0) {
      plan.steps.clear();
      for (int k = 1 + static_cast<int>(rng() % 4); k > 0; --k) plan.steps.push_back(pool[rng() % pool.size()]);
    }
    const auto r = val::validate(d, p, plan);
    if (r.valid) continue;
    const auto a = advise(d, p, plan, r);
    CAPTURE(trial);

    // Achiever universality.
    const auto& ach = a.option_a.action;
    CHECK(ach.preconditions.empty());
    REQUIRE(ach.effects.size() == 1);
    const auto fixed = apply_advice(d, a, ChooseA{});
    const auto ground = val::bind_step(fixed.domain, p, {*fixed.achiever_name, a.option_a.instance.args});
    for (const auto& s : r.states) {
      CHECK(val::applicability(s, ground).applicable);
      const auto next = val::progress(s, ground);
      CHECK(next.holds(a.option_a.target.atom) == (a.option_a.target.polarity == val::Polarity::Positive));
    }

    // Sufficiency for single-literal flaws.
    // An operator requiring both p and (not p) is inapplicable everywhere; no
    // achiever can help, so those mutants are excluded.
    const auto contradictory = [&] {
      const auto& g = r.steps.back().action;
      return std::any_of(g.pre_pos.begin(), g.pre_pos.end(), [&](const auto& x) { return g.pre_neg.contains(x); });
    };
    if (r.flaw && r.flaw->unsatisfied.size() == 1 && !contradictory()) {
      ++flaws;
      const auto augmented = insert_achiever(plan, a, *fixed.achiever_name);
      const auto after = val::validate(fixed.domain, p, augmented);
      CHECK(after.applied_steps() >= r.flaw->step_index + 1);

    }

    // Lifting soundness.
    for (const auto& m : a.option_b) {
      REQUIRE(m.source_step.has_value());
      const auto& step = plan.steps[*m.source_step - 1];
      const auto* op = d.find_action(m.target_operator);
      REQUIRE(op != nullptr);
      CHECK(substitute(m.change.atom, *op, step) == m.target.atom);
    }
  }
  CHECK(flaws > 50);
}
