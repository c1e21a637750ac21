#include "asptk/solver.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace asptk {

SolveTimeout::SolveTimeout(double elapsed_seconds_)
    : std::runtime_error("solve exceeded its time budget after " +
                         std::to_string(elapsed_seconds_) + "s"),
      elapsed_seconds(elapsed_seconds_) {}

TooManyAtoms::TooManyAtoms(size_t count_, size_t cap_)
    : std::runtime_error("brute-force enumeration over " + std::to_string(count_) +
                         " atoms exceeds the cap of " + std::to_string(cap_)),
      count(count_), cap(cap_) {}

/////////////////////////////////////////////////////////////////////////////
// Interpretation-level evaluation
/////////////////////////////////////////////////////////////////////////////

namespace {

bool condition_holds(const std::vector<ConditionLiteral>& cond, const Interpretation& i) {
  for (const auto& c : cond) {
    const auto& al = std::get<AtomLiteral>(c);
    if (al.negated == (i.true_atoms.count(al.atom) > 0)) return false;
  }
  return true;
}

} // namespace

bool eval_aggregate(const AggregateAtom& agg, const Interpretation& i) {
  std::set<std::vector<Term>> tuples;
  for (const auto& e : agg.elements)
    if (condition_holds(e.condition, i)) tuples.insert(e.tuple);
  return guards_hold(agg.left, agg.right, static_cast<long long>(tuples.size()));
}

namespace {

// body literal truth under a total interpretation; aggregates pre-evaluated
bool body_holds(const Rule& r, const Interpretation& i) {
  for (const auto& lit : r.body) {
    if (const auto* a = std::get_if<AtomLiteral>(&lit)) {
      if (a->negated == (i.true_atoms.count(a->atom) > 0)) return false;
    } else if (const auto* b = std::get_if<BuiltinLiteral>(&lit)) {
      if (!eval_cmp(b->lhs, b->op, b->rhs)) return false;
    } else {
      if (!eval_aggregate(std::get<AggregateAtom>(lit), i)) return false;
    }
  }
  return true;
}

} // namespace

bool check_stable(const GroundProgram& g, const Interpretation& i) {
  // constraints must not fire
  for (const auto& r : g.rules)
    if (!r.head && body_holds(r, i)) return false;

  // least model of the reduct: negation and aggregates evaluated under i,
  // positive parts accumulated to fixpoint
  std::set<Atom> least(g.facts.begin(), g.facts.end());
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& r : g.rules) {
      if (!r.head || least.count(*r.head)) continue;
      bool fires = true;
      for (const auto& lit : r.body) {
        if (const auto* a = std::get_if<AtomLiteral>(&lit)) {
          if (a->negated) {
            if (i.true_atoms.count(a->atom)) { fires = false; break; }
          } else {
            if (!least.count(a->atom)) { fires = false; break; }
          }
        } else if (const auto* b = std::get_if<BuiltinLiteral>(&lit)) {
          if (!eval_cmp(b->lhs, b->op, b->rhs)) { fires = false; break; }
        } else {
          if (!eval_aggregate(std::get<AggregateAtom>(lit), i)) { fires = false; break; }
        }
      }
      if (fires) {
        least.insert(*r.head);
        grew = true;
      }
    }
  }
  return least == i.true_atoms;
}

/////////////////////////////////////////////////////////////////////////////
// Backtracking search
/////////////////////////////////////////////////////////////////////////////

namespace {

Tri tri_not(Tri t) {
  if (t == Tri::True) return Tri::False;
  if (t == Tri::False) return Tri::True;
  return Tri::Unknown;
}

struct Search {
  const GroundProgram& g;
  std::chrono::steady_clock::time_point start;
  std::chrono::milliseconds budget;
  size_t step = 0;

  std::vector<Atom> atoms; // canonical order
  std::map<Atom, int> index;
  std::vector<Tri> val;
  std::vector<char> is_fact;

  struct SRule {
    int head = -1; // -1 marks a constraint
    std::vector<int> pos, neg;
    std::vector<const AggregateAtom*> aggs;
  };
  std::vector<SRule> rules;
  std::vector<std::vector<int>> occurs;     // atom -> rules mentioning it
  std::vector<std::vector<int>> head_rules; // atom -> rules deriving it
  std::vector<int> branch;                  // decision atoms, canonical order

  std::vector<int> trail; // assigned atoms, in order
  std::deque<int> queue;
  bool conflict = false;

  explicit Search(const GroundProgram& prog, std::chrono::milliseconds budget_)
      : g(prog), start(std::chrono::steady_clock::now()), budget(budget_) {
    build();
  }

  void tick() {
    if (budget.count() == 0 || (++step & 1023) != 0) return;
    auto elapsed = std::chrono::steady_clock::now() - start;
    if (elapsed > budget)
      throw SolveTimeout(std::chrono::duration<double>(elapsed).count());
  }

  int intern(const Atom& a) {
    auto it = index.find(a);
    return it == index.end() ? -1 : it->second;
  }

  void build() {
    std::set<Atom> universe(g.facts.begin(), g.facts.end());
    auto touch_agg = [&](const AggregateAtom& agg) {
      for (const auto& e : agg.elements)
        for (const auto& c : e.condition) universe.insert(std::get<AtomLiteral>(c).atom);
    };
    for (const auto& r : g.rules) {
      if (r.head) universe.insert(*r.head);
      for (const auto& lit : r.body) {
        if (const auto* a = std::get_if<AtomLiteral>(&lit))
          universe.insert(a->atom);
        else if (const auto* agg = std::get_if<AggregateAtom>(&lit))
          touch_agg(*agg);
      }
    }
    atoms.assign(universe.begin(), universe.end());
    for (size_t i = 0; i < atoms.size(); ++i) index[atoms[i]] = static_cast<int>(i);
    val.assign(atoms.size(), Tri::Unknown);
    is_fact.assign(atoms.size(), 0);
    for (const auto& f : g.facts) is_fact[intern(f)] = 1;
    occurs.assign(atoms.size(), {});
    head_rules.assign(atoms.size(), {});

    std::set<int> branch_set;
    for (const auto& r : g.rules) {
      SRule sr;
      std::set<int> touched;
      if (r.head) {
        sr.head = intern(*r.head);
        touched.insert(sr.head);
      }
      for (const auto& lit : r.body) {
        if (const auto* a = std::get_if<AtomLiteral>(&lit)) {
          int i = intern(a->atom);
          (a->negated ? sr.neg : sr.pos).push_back(i);
          touched.insert(i);
          if (a->negated) branch_set.insert(i);
        } else if (const auto* agg = std::get_if<AggregateAtom>(&lit)) {
          sr.aggs.push_back(agg);
          for (const auto& e : agg->elements)
            for (const auto& c : e.condition) {
              int i = intern(std::get<AtomLiteral>(c).atom);
              touched.insert(i);
              branch_set.insert(i);
            }
        }
      }
      int ri = static_cast<int>(rules.size());
      rules.push_back(std::move(sr));
      if (rules.back().head >= 0) head_rules[rules.back().head].push_back(ri);
      for (int i : touched) occurs[i].push_back(ri);
    }
    branch.assign(branch_set.begin(), branch_set.end());
  }

  void assign(int a, Tri v) {
    if (val[a] != Tri::Unknown) {
      if (val[a] != v) conflict = true;
      return;
    }
    val[a] = v;
    trail.push_back(a);
    queue.push_back(a);
  }

  Tri agg_tri(const AggregateAtom& agg) const {
    std::set<std::vector<Term>> definite, possible;
    for (const auto& e : agg.elements) {
      Tri ct = Tri::True;
      for (const auto& c : e.condition) {
        const auto& al = std::get<AtomLiteral>(c);
        Tri t = val[index.at(al.atom)];
        if (al.negated) t = tri_not(t);
        if (t == Tri::False) { ct = Tri::False; break; }
        if (t == Tri::Unknown) ct = Tri::Unknown;
      }
      if (ct == Tri::False) continue;
      possible.insert(e.tuple);
      if (ct == Tri::True) definite.insert(e.tuple);
    }
    return guards_over_range(agg.left, agg.right,
                             static_cast<long long>(definite.size()),
                             static_cast<long long>(possible.size()));
  }

  Tri body_tri(const SRule& r) const {
    Tri out = Tri::True;
    for (int p : r.pos) {
      if (val[p] == Tri::False) return Tri::False;
      if (val[p] == Tri::Unknown) out = Tri::Unknown;
    }
    for (int n : r.neg) {
      if (val[n] == Tri::True) return Tri::False;
      if (val[n] == Tri::Unknown) out = Tri::Unknown;
    }
    for (const auto* agg : r.aggs) {
      Tri t = agg_tri(*agg);
      if (t == Tri::False) return Tri::False;
      if (t == Tri::Unknown) out = Tri::Unknown;
    }
    return out;
  }

  // constraint with exactly one unassigned plain literal and all else true:
  // force the open literal false
  void constraint_unit(const SRule& r) {
    int open_pos = -1, open_neg = -1;
    int open = 0;
    for (int p : r.pos) {
      if (val[p] == Tri::False) return;
      if (val[p] == Tri::Unknown) { ++open; open_pos = p; }
    }
    for (int n : r.neg) {
      if (val[n] == Tri::True) return;
      if (val[n] == Tri::Unknown) { ++open; open_neg = n; open_pos = -1; }
    }
    for (const auto* agg : r.aggs) {
      Tri t = agg_tri(*agg);
      if (t == Tri::False) return;
      if (t == Tri::Unknown) return; // cannot force through an aggregate
    }
    if (open == 0) { conflict = true; return; }
    if (open != 1) return;
    if (open_pos >= 0) assign(open_pos, Tri::False);
    if (open_neg >= 0) assign(open_neg, Tri::True);
  }

  void examine(int ri) {
    const SRule& r = rules[ri];
    if (r.head < 0) {
      constraint_unit(r);
      return;
    }
    Tri bt = body_tri(r);
    if (bt == Tri::True) {
      assign(r.head, Tri::True);
    } else if (bt == Tri::False) {
      // head may have lost its last potential support
      if (is_fact[r.head]) return;
      for (int other : head_rules[r.head])
        if (body_tri(rules[other]) != Tri::False) return;
      if (val[r.head] == Tri::True)
        conflict = true;
      else
        assign(r.head, Tri::False);
    }
  }

  void propagate() {
    while (!queue.empty() && !conflict) {
      tick();
      int a = queue.front();
      queue.pop_front();
      for (int ri : occurs[a]) {
        examine(ri);
        if (conflict) return;
      }
    }
  }

  void root_propagate() {
    for (const auto& f : g.facts) assign(intern(f), Tri::True);
    for (size_t i = 0; i < atoms.size(); ++i)
      if (!is_fact[i] && head_rules[i].empty()) assign(static_cast<int>(i), Tri::False);
    for (size_t ri = 0; ri < rules.size() && !conflict; ++ri)
      examine(static_cast<int>(ri));
    propagate();
  }

  // Least model of the reduct determined by the branch assignment; accepted
  // only when it agrees with that assignment and passes the full check.
  std::optional<AnswerSet> finalize() const {
    std::vector<char> in(atoms.size(), 0);
    for (const auto& f : g.facts) in[index.at(f)] = 1;
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& r : rules) {
        if (r.head < 0 || in[r.head]) continue;
        bool fires = true;
        for (int n : r.neg)
          if (val[n] != Tri::False) { fires = false; break; }
        if (fires)
          for (const auto* agg : r.aggs)
            if (agg_tri(*agg) != Tri::True) { fires = false; break; }
        if (fires)
          for (int p : r.pos)
            if (!in[p]) { fires = false; break; }
        if (fires) {
          in[r.head] = 1;
          grew = true;
        }
      }
    }
    for (int b : branch)
      if ((in[b] != 0) != (val[b] == Tri::True)) return std::nullopt;
    Interpretation i;
    for (size_t a = 0; a < atoms.size(); ++a)
      if (in[a]) i.true_atoms.insert(atoms[a]);
    if (!check_stable(g, i)) return std::nullopt;
    return AnswerSet{std::move(i.true_atoms)};
  }

  std::vector<AnswerSet> run(size_t max_models) {
    std::vector<AnswerSet> models;
    root_propagate();
    if (conflict) return models;

    struct Decision {
      int atom;
      size_t mark;
      bool tried_false;
    };
    std::vector<Decision> stack;

    auto unwind = [&](size_t mark) {
      while (trail.size() > mark) {
        val[trail.back()] = Tri::Unknown;
        trail.pop_back();
      }
      queue.clear();
      conflict = false;
    };

    for (;;) {
      tick();
      if (!conflict) {
        int next = -1;
        for (int b : branch)
          if (val[b] == Tri::Unknown) { next = b; break; }
        if (next < 0) {
          if (auto m = finalize()) {
            models.push_back(std::move(*m));
            if (max_models && models.size() >= max_models) return models;
          }
          conflict = true; // force exploration of the next branch
        } else {
          stack.push_back({next, trail.size(), false});
          assign(next, Tri::True);
          propagate();
        }
      } else {
        // climb to the deepest decision with an untried branch
        while (!stack.empty() && stack.back().tried_false) {
          unwind(stack.back().mark);
          stack.pop_back();
        }
        if (stack.empty()) return models;
        Decision& d = stack.back();
        unwind(d.mark);
        d.tried_false = true;
        assign(d.atom, Tri::False);
        propagate();
      }
    }
  }
};

} // namespace

std::vector<AnswerSet> solve(const GroundProgram& g, const SolveOptions& opts) {
  Search s(g, opts.timeout);
  return s.run(opts.max_models);
}

std::vector<AnswerSet> enumerate_brute_force(const GroundProgram& g) {
  constexpr size_t kCap = 24;
  std::set<Atom> universe(g.facts.begin(), g.facts.end());
  for (const auto& r : g.rules) {
    if (r.head) universe.insert(*r.head);
    for (const auto& lit : r.body) {
      if (const auto* a = std::get_if<AtomLiteral>(&lit)) {
        universe.insert(a->atom);
      } else if (const auto* agg = std::get_if<AggregateAtom>(&lit)) {
        for (const auto& e : agg->elements)
          for (const auto& c : e.condition) universe.insert(std::get<AtomLiteral>(c).atom);
      }
    }
  }
  if (universe.size() > kCap) throw TooManyAtoms(universe.size(), kCap);

  // facts belong to every stable model; enumerate subsets of the rest
  std::vector<Atom> free_atoms;
  for (const auto& a : universe)
    if (!g.facts.count(a)) free_atoms.push_back(a);

  std::vector<AnswerSet> out;
  for (uint64_t mask = 0; mask < (uint64_t{1} << free_atoms.size()); ++mask) {
    Interpretation i;
    i.true_atoms.insert(g.facts.begin(), g.facts.end());
    for (size_t b = 0; b < free_atoms.size(); ++b)
      if (mask & (uint64_t{1} << b)) i.true_atoms.insert(free_atoms[b]);
    if (check_stable(g, i)) out.push_back(AnswerSet{std::move(i.true_atoms)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace asptk
