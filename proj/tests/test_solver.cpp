#include "doctest.h"

#include "asptk/grounder.hpp"
#include "asptk/hcp.hpp"
#include "asptk/parser.hpp"
#include "asptk/printer.hpp"
#include "asptk/solver.hpp"
#include "testutil.hpp"

using namespace asptk;
using namespace testutil;

namespace {
GroundProgram ground_text(const char* text) {
  return ground(parse_program(text));
}
} // namespace

TEST_CASE("classic even and odd negation loops") {
  auto ms = model_sets(solve(ground_text("a :- not b. b :- not a.\n")));
  CHECK(ms == std::set<std::set<Atom>>{{Atom{"a", {}}}, {Atom{"b", {}}}});
  CHECK(solve(ground_text("a :- not a.\n")).empty());
  CHECK(solve(ground_text("p. :- p.\n")).empty());
  auto one = model_sets(solve(ground_text("a :- not b.\n")));
  CHECK(one == std::set<std::set<Atom>>{{Atom{"a", {}}}});
}

TEST_CASE("supportedness: circular support is no support") {
  CHECK(model_sets(solve(ground_text("a :- b. b :- a.\n"))) ==
        std::set<std::set<Atom>>{{}});
}

TEST_CASE("negation loop through aggregates") {
  auto ms = model_sets(solve(ground_text(
      "a :- 1 > #count { 1 : b }. b :- 1 > #count { 1 : a }.\n")));
  CHECK(ms == std::set<std::set<Atom>>{{Atom{"a", {}}}, {Atom{"b", {}}}});
}

TEST_CASE("count counts distinct tuples") {
  Interpretation i;
  i.true_atoms.insert(Atom{"p", {Term::integer(1)}});
  i.true_atoms.insert(Atom{"q", {Term::integer(1)}});
  // two elements with the same tuple: both hold, counted once
  auto p = parse_program(
      ":- 2 <= #count { 1 : p(1) ; 1 : q(1) }.\n"
      ":- 1 > #count { 1 : p(1) ; 1 : q(1) }.\n");
  const auto& same = std::get<AggregateAtom>(p.rules[0].body[0]);
  CHECK_FALSE(eval_aggregate(same, i)); // count is 1, not 2
  const auto& low = std::get<AggregateAtom>(p.rules[1].body[0]);
  CHECK_FALSE(eval_aggregate(low, i));

  auto q = parse_program(":- 2 <= #count { 1 : p(1) ; 2 : q(1) }.\n");
  CHECK(eval_aggregate(std::get<AggregateAtom>(q.rules[0].body[0]), i));
}

TEST_CASE("count over an empty element set and empty conditions") {
  Interpretation empty;
  auto p = parse_program(":- 0 <= #count { }.\n:- 1 <= #count { }.\n");
  CHECK(eval_aggregate(std::get<AggregateAtom>(p.rules[0].body[0]), empty));
  CHECK_FALSE(
      eval_aggregate(std::get<AggregateAtom>(p.rules[1].body[0]), empty));
}

TEST_CASE("two-sided guards bound the count from both ends") {
  Interpretation i;
  i.true_atoms.insert(Atom{"p", {Term::integer(1)}});
  i.true_atoms.insert(Atom{"p", {Term::integer(2)}});
  auto p = parse_program(
      ":- 1 <= #count { 1 : p(1) ; 2 : p(2) ; 3 : p(3) } <= 2.\n"
      ":- 3 <= #count { 1 : p(1) ; 2 : p(2) ; 3 : p(3) } <= 5.\n");
  CHECK(eval_aggregate(std::get<AggregateAtom>(p.rules[0].body[0]), i));
  CHECK_FALSE(eval_aggregate(std::get<AggregateAtom>(p.rules[1].body[0]), i));
}

TEST_CASE("negated atoms inside aggregate conditions") {
  auto ms = model_sets(solve(ground_text(
      "a :- not b. b :- not a.\n:- 1 <= #count { 1 : not b }.\n")));
  CHECK(ms == std::set<std::set<Atom>>{{Atom{"b", {}}}});
}

TEST_CASE("check_stable accepts exactly the solver's models") {
  auto g = ground(parse_program(module_frame_text()));
  auto models = solve(g);
  REQUIRE(models.size() == 1);
  CHECK(check_stable(g, Interpretation{models[0].atoms}));

  auto broken = models[0].atoms;
  broken.erase(Atom{"mINf", {Term::integer(2), Term::integer(1)}});
  CHECK_FALSE(check_stable(g, Interpretation{broken}));
  broken = models[0].atoms;
  broken.insert(Atom{"mINf", {Term::integer(1), Term::integer(1)}});
  CHECK_FALSE(check_stable(g, Interpretation{broken}));
  CHECK_FALSE(check_stable(g, Interpretation{}));
}

TEST_CASE("max_models stops the enumeration early") {
  auto g = ground_text(
      "p(X) :- d(X), not pn(X). pn(X) :- d(X), not p(X). d(1). d(2). d(3).\n");
  CHECK(solve(g).size() == 8);
  CHECK(solve(g, SolveOptions{.max_models = 1}).size() == 1);
  CHECK(solve(g, SolveOptions{.max_models = 3}).size() == 3);
}

TEST_CASE("solve and brute force agree on the fixtures") {
  for (const char* text :
       {module_frame_text(), "a :- not b. b :- not a.\n:- a.\n",
        "sel(X) :- d(X), not seln(X). seln(X) :- d(X), not sel(X).\n"
        ":- 2 <= #count { X : sel(X) }.\n:- 1 > #count { X : sel(X) }.\n"
        "d(1). d(2). d(3).\n"}) {
    auto g = ground(parse_program(text));
    CHECK(model_sets(solve(g)) == model_sets(enumerate_brute_force(g)));
  }
}

TEST_CASE("solve and brute force agree on random ground programs") {
  std::mt19937 rng(424243);
  for (int i = 0; i < 200; ++i) {
    auto p = random_ground_program(rng);
    auto g = ground(p); // random programs are already ground
    CAPTURE(render_program(g));
    REQUIRE(model_sets(solve(g)) == model_sets(enumerate_brute_force(g)));
  }
}

TEST_CASE("brute force enumeration refuses oversized atom universes") {
  std::ostringstream src;
  src << "p(X) :- d(X), not pn(X). pn(X) :- d(X), not p(X).\n";
  for (int i = 1; i <= 20; ++i) src << "d(" << i << ").\n";
  CHECK_THROWS_AS(enumerate_brute_force(ground(parse_program(src.str()))),
                  TooManyAtoms);
}

TEST_CASE("solver timeout raises once the budget is spent") {
  hcp::InstanceSpec spec;
  spec.persons = 3;
  Program p = hcp::encoding();
  for (const auto& a : hcp::gen_instance(spec)) p.facts.push_back(a);
  auto g = ground(p);
  SolveOptions opts;
  opts.timeout = std::chrono::milliseconds(1);
  try {
    solve(g, opts); // full enumeration takes seconds, the budget is 1ms
    FAIL("expected SolveTimeout");
  } catch (const SolveTimeout& e) {
    CHECK(e.elapsed_seconds > 0.0);
    CHECK(e.elapsed_seconds < 2.0);
  }
}
