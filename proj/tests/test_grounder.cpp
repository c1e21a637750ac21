#include "doctest.h"

#include "asptk/grounder.hpp"
#include "asptk/parser.hpp"
#include "asptk/printer.hpp"
#include "asptk/solver.hpp"
#include "testutil.hpp"

using namespace asptk;
using namespace testutil;

TEST_CASE("module/frame grounding matches the golden file") {
  auto g = ground(parse_program(module_frame_text()));
  CHECK(render_program(g) == read_golden("mf_ground.lp"));
  CHECK(g.rules.size() == 13);
  CHECK(g.facts.size() == 6);
  CHECK(g.facts.count(Atom{"mINf", {Term::integer(1), Term::integer(2)}}));
  CHECK(g.facts.count(Atom{"modulePlaced", {Term::integer(1)}}));
}

TEST_CASE("module/frame grounding stats are frozen") {
  auto g = ground(parse_program(module_frame_text()));
  auto s = grounding_stats(g, 0.25);
  CHECK(s.rule_count == 19);
  CHECK(s.constraint_count == 5);
  CHECK(s.atom_occurrences == 29);
  CHECK(s.bytes == render_program(g).size());
  CHECK(s.elapsed_seconds == 0.25);
}

TEST_CASE("derived facts are promoted and satisfied rules dissolve") {
  auto g = ground(parse_program("a. b :- a. c :- b, not d.\n"));
  CHECK(g.rules.empty());
  CHECK(g.facts == std::set<Atom>{Atom{"a", {}}, Atom{"b", {}},
                                  Atom{"c", {}}});
}

TEST_CASE("an unsatisfiable core collapses to the falsum constraint") {
  auto g = ground(parse_program(":- not p.\n"));
  CHECK(g.facts.empty());
  REQUIRE(g.rules.size() == 1);
  CHECK(render_rule(g.rules[0]) == ":- 0 <= #count { }.");
  CHECK(solve(g).empty());
}

TEST_CASE("never-derivable bodies erase rules") {
  auto g = ground(parse_program("p(X) :- d(X), q(X). d(1). d(2).\n"));
  // q is never derivable, so no p rule survives
  CHECK(g.rules.empty());
  CHECK(g.facts == std::set<Atom>{Atom{"d", {Term::integer(1)}},
                                  Atom{"d", {Term::integer(2)}}});
}

TEST_CASE("builtins are evaluated away during instantiation") {
  auto g = ground(parse_program(
      "le(X,Y) :- d(X), d(Y), X < Y. d(1). d(2). d(3).\n"));
  CHECK(g.facts.count(Atom{"le", {Term::integer(1), Term::integer(2)}}));
  CHECK(g.facts.count(Atom{"le", {Term::integer(1), Term::integer(3)}}));
  CHECK(g.facts.count(Atom{"le", {Term::integer(2), Term::integer(3)}}));
  CHECK(g.facts.size() == 6);
  CHECK(g.rules.empty());
}

TEST_CASE("symmetric constraint instances merge unless kept") {
  auto p = parse_program(
      "p(X) :- d(X), not pn(X). pn(X) :- d(X), not p(X).\n"
      ":- p(X), p(Y), X <> Y. d(1). d(2).\n");
  auto merged = ground(p);
  GroundOptions keep;
  keep.keep_symmetric = true;
  auto kept = ground(p, keep);
  size_t merged_cons = 0, kept_cons = 0;
  for (const auto& r : merged.rules) merged_cons += r.is_constraint();
  for (const auto& r : kept.rules) kept_cons += r.is_constraint();
  CHECK(merged_cons == 1);
  CHECK(kept_cons == 2);
  CHECK(model_sets(solve(merged)) == model_sets(solve(kept)));
}

TEST_CASE("the instance cap aborts oversized groundings") {
  std::ostringstream src;
  for (int i = 1; i <= 40; ++i) src << "d(" << i << ").\n";
  src << "e(X,Y,Z) :- d(X), d(Y), d(Z), not f(X,Y,Z).\n";
  src << "f(X,Y,Z) :- d(X), d(Y), d(Z), not e(X,Y,Z).\n";
  GroundOptions tight;
  tight.instance_cap = 1000;
  CHECK_THROWS_AS(ground(parse_program(src.str()), tight), UniverseTooLarge);
  CHECK_THROWS_AS(herbrand_instantiate(parse_program(src.str()), tight),
                  UniverseTooLarge);
}

TEST_CASE("reference and simplifying instantiation agree on the fixture") {
  auto p = parse_program(module_frame_text());
  CHECK(model_sets(solve(ground(p))) ==
        model_sets(solve(herbrand_instantiate(p))));
}

TEST_CASE("reference and simplifying instantiation agree on random programs") {
  std::mt19937 rng(20240917);
  for (int i = 0; i < 150; ++i) {
    auto p = random_guess_check(rng);
    CAPTURE(render_program(p));
    auto fast = model_sets(solve(ground(p)));
    auto slow = model_sets(solve(herbrand_instantiate(p)));
    REQUIRE(fast == slow);
  }
}

TEST_CASE("aggregate guards already decided at ground time simplify") {
  // count over an empty universe: guard 1 > #count{...} is always true,
  // so the constraint body reduces and the guess below dies
  auto g = ground(parse_program(
      "p :- not q. q :- not p.\n:- p, 1 > #count { X : r(X) }.\n"));
  auto ms = model_sets(solve(g));
  REQUIRE(ms.size() == 1);
  CHECK(ms.count({Atom{"q", {}}}));
}

TEST_CASE("grounding keeps aggregates whose value is undecided") {
  auto p = parse_program(
      "sel(X) :- d(X), not seln(X). seln(X) :- d(X), not sel(X).\n"
      ":- 2 <= #count { X : sel(X) }.\nd(1). d(2). d(3).\n");
  auto ms = model_sets(solve(ground(p)));
  // any subset of size <= 1 over three elements
  CHECK(ms.size() == 4);
  for (const auto& m : ms) {
    size_t nsel = 0;
    for (const auto& a : m) nsel += a.predicate == "sel";
    CHECK(nsel <= 1);
  }
}
