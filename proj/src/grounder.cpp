#include "asptk/grounder.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>

#include "asptk/printer.hpp"

namespace asptk {

UniverseTooLarge::UniverseTooLarge(size_t limit_)
    : std::runtime_error("grounding would exceed the instance cap of " +
                         std::to_string(limit_)),
      limit(limit_) {}

namespace {

/////////////////////////////////////////////////////////////////////////////
// Matching ground atoms against patterns
/////////////////////////////////////////////////////////////////////////////

Term resolve(const Term& t, const Substitution& s) {
  if (t.kind != TermKind::Variable) return t;
  const Term* b = s.find(t.name);
  return b ? *b : t;
}

//! Atom store indexed by predicate and, for selective joins, by predicate
//! plus first argument.
struct AtomIndex {
  std::set<Atom> all;
  std::map<std::string, std::vector<Atom>> by_pred;
  std::map<std::pair<std::string, Term>, std::vector<Atom>> by_pred_arg0;

  bool insert(const Atom& a) {
    if (!all.insert(a).second) return false;
    by_pred[a.predicate].push_back(a);
    if (!a.args.empty()) by_pred_arg0[{a.predicate, a.args[0]}].push_back(a);
    return true;
  }

  const std::vector<Atom>& candidates(const Atom& pattern, const Substitution& s) const {
    static const std::vector<Atom> none;
    if (!pattern.args.empty()) {
      Term first = resolve(pattern.args[0], s);
      if (first.kind != TermKind::Variable) {
        auto it = by_pred_arg0.find({pattern.predicate, first});
        return it == by_pred_arg0.end() ? none : it->second;
      }
    }
    auto it = by_pred.find(pattern.predicate);
    return it == by_pred.end() ? none : it->second;
  }
};

// Matches `pattern` under `s` against a ground atom, extending `s`. Newly
// bound variable names go onto `trail` so the caller can undo.
bool match_atom(const Atom& pattern, const Atom& ground, Substitution& s,
                std::vector<std::string>& trail) {
  if (pattern.predicate != ground.predicate || pattern.args.size() != ground.args.size())
    return false;
  size_t mark = trail.size();
  for (size_t i = 0; i < pattern.args.size(); ++i) {
    Term t = resolve(pattern.args[i], s);
    if (t.kind == TermKind::Variable) {
      s.bindings[t.name] = ground.args[i];
      trail.push_back(t.name);
    } else if (t != ground.args[i]) {
      for (size_t j = trail.size(); j > mark; --j) s.bindings.erase(trail[j - 1]);
      trail.resize(mark);
      return false;
    }
  }
  return true;
}

struct RuleView {
  const Rule* rule;
  std::vector<const Atom*> positives;
  std::vector<const BuiltinLiteral*> builtins;

  explicit RuleView(const Rule& r) : rule(&r) {
    for (const auto& lit : r.body) {
      if (const auto* a = std::get_if<AtomLiteral>(&lit)) {
        if (!a->negated) positives.push_back(&a->atom);
      } else if (const auto* b = std::get_if<BuiltinLiteral>(&lit)) {
        builtins.push_back(b);
      }
    }
  }
};

bool builtins_hold(const std::vector<const BuiltinLiteral*>& builtins, const Substitution& s) {
  for (const auto* b : builtins)
    if (!eval_cmp(resolve(b->lhs, s), b->op, resolve(b->rhs, s))) return false;
  return true;
}

//! Depth-first join of positive literals over an atom index. Emits every
//! substitution under which all positives match and all builtins hold.
void enumerate_bindings(const std::vector<const Atom*>& positives,
                        const std::vector<const BuiltinLiteral*>& builtins,
                        const AtomIndex& idx, size_t i, Substitution& s,
                        std::vector<std::string>& trail,
                        const std::function<void(const Substitution&)>& emit) {
  if (i == positives.size()) {
    if (builtins_hold(builtins, s)) emit(s);
    return;
  }
  for (const Atom& cand : idx.candidates(*positives[i], s)) {
    size_t mark = trail.size();
    if (match_atom(*positives[i], cand, s, trail)) {
      enumerate_bindings(positives, builtins, idx, i + 1, s, trail, emit);
      for (size_t j = trail.size(); j > mark; --j) s.bindings.erase(trail[j - 1]);
      trail.resize(mark);
    }
  }
}

/////////////////////////////////////////////////////////////////////////////
// Shared grounding machinery
/////////////////////////////////////////////////////////////////////////////

struct InstanceCounter {
  size_t used = 0;
  size_t cap;
  explicit InstanceCounter(size_t c) : cap(c) {}
  void bump(size_t n = 1) {
    used += n;
    if (used > cap) throw UniverseTooLarge(cap);
  }
};

//! Instantiate one aggregate under a global binding. Local variables are
//! bound by matching the positive condition atoms against `idx`; condition
//! builtins are evaluated and removed. Ground elements are deduplicated.
AggregateAtom expand_aggregate(const AggregateAtom& agg, const Substitution& global,
                               const AtomIndex& idx, InstanceCounter& counter) {
  AggregateAtom out;
  if (agg.left) out.left = Guard{resolve(agg.left->bound, global), agg.left->op};
  if (agg.right) out.right = Guard{resolve(agg.right->bound, global), agg.right->op};

  std::set<AggregateElement> elems;
  for (const auto& e : agg.elements) {
    std::vector<const Atom*> positives;
    std::vector<const BuiltinLiteral*> builtins;
    for (const auto& c : e.condition) {
      if (const auto* a = std::get_if<AtomLiteral>(&c)) {
        if (!a->negated) positives.push_back(&a->atom);
      } else {
        builtins.push_back(&std::get<BuiltinLiteral>(c));
      }
    }
    Substitution s = global;
    std::vector<std::string> trail;
    enumerate_bindings(positives, builtins, idx, 0, s, trail,
                       [&](const Substitution& full) {
                         counter.bump();
                         AggregateElement ge;
                         for (const auto& t : e.tuple) ge.tuple.push_back(resolve(t, full));
                         for (const auto& c : e.condition)
                           if (const auto* a = std::get_if<AtomLiteral>(&c))
                             ge.condition.push_back(
                                 AtomLiteral{a->negated, apply_substitution(a->atom, full)});
                         elems.insert(std::move(ge));
                       });
  }
  out.elements.assign(elems.begin(), elems.end());
  return out;
}

//! Instantiate `rule` under a complete global binding: builtins are already
//! checked by the enumeration, so the ground body keeps atom literals and
//! expanded aggregates only.
Rule instantiate_rule(const Rule& rule, const Substitution& s, const AtomIndex& idx,
                      InstanceCounter& counter) {
  Rule out;
  if (rule.head) out.head = apply_substitution(*rule.head, s);
  for (const auto& lit : rule.body) {
    if (const auto* a = std::get_if<AtomLiteral>(&lit))
      out.body.push_back(AtomLiteral{a->negated, apply_substitution(a->atom, s)});
    else if (std::get_if<AggregateAtom>(&lit))
      out.body.push_back(expand_aggregate(std::get<AggregateAtom>(lit), s, idx, counter));
  }
  return out;
}

/////////////////////////////////////////////////////////////////////////////
// Derivability overapproximation
/////////////////////////////////////////////////////////////////////////////

// Least model of the positive projection: negation and aggregates are taken
// as true, builtins are evaluated. Every atom a stable model of the program
// could contain is derivable in this sense.
AtomIndex derivable_atoms(const Program& p, InstanceCounter& counter) {
  AtomIndex idx;
  std::vector<Atom> delta;
  for (const auto& f : p.facts)
    if (idx.insert(f)) delta.push_back(f);

  std::vector<RuleView> views;
  for (const auto& r : p.rules)
    if (r.head) views.push_back(RuleView(r));

  // rules with no positive body atoms fire unconditionally (safety makes
  // their heads ground)
  for (const auto& rv : views) {
    if (!rv.positives.empty()) continue;
    Substitution empty;
    if (!builtins_hold(rv.builtins, empty)) continue;
    counter.bump();
    if (idx.insert(*rv.rule->head)) delta.push_back(*rv.rule->head);
  }

  // semi-naive rounds: every new derivation must match at least one atom
  // added in the previous round, tried at each pivot position
  while (!delta.empty()) {
    AtomIndex delta_idx;
    for (const auto& a : delta) delta_idx.insert(a);
    std::vector<Atom> next;
    for (const auto& rv : views) {
      for (size_t pivot = 0; pivot < rv.positives.size(); ++pivot) {
        std::vector<const Atom*> rest;
        for (size_t i = 0; i < rv.positives.size(); ++i)
          if (i != pivot) rest.push_back(rv.positives[i]);
        Substitution s;
        std::vector<std::string> trail;
        for (const Atom& seed : delta_idx.candidates(*rv.positives[pivot], s)) {
          if (!match_atom(*rv.positives[pivot], seed, s, trail)) continue;
          enumerate_bindings(rest, rv.builtins, idx, 0, s, trail,
                             [&](const Substitution& full) {
                               counter.bump();
                               Atom head = apply_substitution(*rv.rule->head, full);
                               if (idx.insert(head)) next.push_back(head);
                             });
          for (size_t j = trail.size(); j > 0; --j) s.bindings.erase(trail[j - 1]);
          trail.clear();
        }
      }
    }
    delta = std::move(next);
  }
  return idx;
}

/////////////////////////////////////////////////////////////////////////////
// Simplification
/////////////////////////////////////////////////////////////////////////////

enum class AtomState { Fact, Maybe, Never };

struct StateMap {
  std::map<Atom, AtomState> states; // absent means Never

  AtomState get(const Atom& a) const {
    auto it = states.find(a);
    return it == states.end() ? AtomState::Never : it->second;
  }
};

// Always-violated body for constraints whose literals all simplified away:
// count over no elements is 0 and 0 <= 0 holds.
Literal falsum() {
  AggregateAtom agg;
  agg.left = Guard{Term::integer(0), CmpOp::Le};
  return agg;
}

// Such constraints are final; simplification must not reopen them.
bool is_falsum_constraint(const Rule& r) {
  if (r.head || r.body.size() != 1) return false;
  const auto* agg = std::get_if<AggregateAtom>(&r.body[0]);
  return agg && agg->elements.empty() && agg->left && !agg->right &&
         agg->left->op == CmpOp::Le && agg->left->bound == Term::integer(0);
}

enum class RuleFate { Keep, Drop, BecameFact };

//! One simplification pass over a single rule. Returns what the caller must
//! do with it; `changed` is set when anything was removed or decided.
RuleFate simplify_rule(Rule& r, const StateMap& sm, bool& changed) {
  if (is_falsum_constraint(r)) return RuleFate::Keep;
  if (r.head && sm.get(*r.head) == AtomState::Fact) {
    // head already determined; the rule adds nothing
    changed = true;
    return RuleFate::Drop;
  }

  std::vector<Literal> body;
  for (auto& lit : r.body) {
    if (const auto* a = std::get_if<AtomLiteral>(&lit)) {
      AtomState st = sm.get(a->atom);
      if (!a->negated) {
        if (st == AtomState::Fact) { changed = true; continue; }
        if (st == AtomState::Never) { changed = true; return RuleFate::Drop; }
      } else {
        if (st == AtomState::Never) { changed = true; continue; }
        if (st == AtomState::Fact) { changed = true; return RuleFate::Drop; }
      }
      body.push_back(std::move(lit));
    } else if (const auto* b = std::get_if<BuiltinLiteral>(&lit)) {
      // only herbrand output carries builtins this far; evaluate them away
      changed = true;
      if (!eval_cmp(b->lhs, b->op, b->rhs)) return RuleFate::Drop;
    } else {
      auto& agg = std::get<AggregateAtom>(lit);
      std::set<AggregateElement> kept;
      std::set<std::vector<Term>> definite, possible;
      bool elem_changed = false;
      for (auto& e : agg.elements) {
        std::vector<ConditionLiteral> cond;
        bool dead = false;
        for (auto& c : e.condition) {
          const auto& al = std::get<AtomLiteral>(c);
          AtomState st = sm.get(al.atom);
          if (!al.negated) {
            if (st == AtomState::Fact) { elem_changed = true; continue; }
            if (st == AtomState::Never) { elem_changed = true; dead = true; break; }
          } else {
            if (st == AtomState::Never) { elem_changed = true; continue; }
            if (st == AtomState::Fact) { elem_changed = true; dead = true; break; }
          }
          cond.push_back(std::move(c));
        }
        if (dead) continue;
        if (cond.empty()) definite.insert(e.tuple);
        possible.insert(e.tuple);
        kept.insert(AggregateElement{std::move(e.tuple), std::move(cond)});
      }
      Tri value = guards_over_range(agg.left, agg.right,
                                    static_cast<long long>(definite.size()),
                                    static_cast<long long>(possible.size()));
      if (value == Tri::True) { changed = true; continue; }
      if (value == Tri::False) { changed = true; return RuleFate::Drop; }
      if (elem_changed || kept.size() != agg.elements.size()) changed = true;
      agg.elements.assign(kept.begin(), kept.end());
      body.push_back(std::move(lit));
    }
  }
  r.body = std::move(body);

  if (r.body.empty()) {
    if (r.head) { changed = true; return RuleFate::BecameFact; }
    changed = true;
    r.body.push_back(falsum());
  }
  return RuleFate::Keep;
}

std::string body_sort_key(const Literal& l) { return render_literal(l); }

void canonicalize_rule(Rule& r) {
  for (auto& lit : r.body) {
    if (auto* agg = std::get_if<AggregateAtom>(&lit)) {
      for (auto& e : agg->elements)
        std::sort(e.condition.begin(), e.condition.end(),
                  [](const ConditionLiteral& x, const ConditionLiteral& y) {
                    return render_literal(x) < render_literal(y);
                  });
      std::sort(agg->elements.begin(), agg->elements.end());
    }
  }
  std::sort(r.body.begin(), r.body.end(), [](const Literal& x, const Literal& y) {
    return body_sort_key(x) < body_sort_key(y);
  });
}

//! Deduplicate by rendered form and order rules canonically.
std::vector<Rule> finalize_rules(std::vector<Rule> rules, bool keep_symmetric) {
  if (!keep_symmetric)
    for (auto& r : rules) canonicalize_rule(r);
  std::vector<std::pair<std::string, Rule>> keyed;
  keyed.reserve(rules.size());
  for (auto& r : rules) keyed.emplace_back(render_rule(r), std::move(r));
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Rule> out;
  for (auto& [key, rule] : keyed)
    if (out.empty() || key != render_rule(out.back())) out.push_back(std::move(rule));
  return out;
}

} // namespace

/////////////////////////////////////////////////////////////////////////////
// ground()
/////////////////////////////////////////////////////////////////////////////

GroundProgram ground(const Program& p, const GroundOptions& opts) {
  InstanceCounter counter(opts.instance_cap);
  AtomIndex derivable = derivable_atoms(p, counter);

  // instantiate every rule over the derivable atoms
  std::vector<Rule> rules;
  for (const auto& r : p.rules) {
    RuleView rv(r);
    Substitution s;
    std::vector<std::string> trail;
    enumerate_bindings(rv.positives, rv.builtins, derivable, 0, s, trail,
                       [&](const Substitution& full) {
                         counter.bump();
                         rules.push_back(instantiate_rule(r, full, derivable, counter));
                       });
  }

  // iterate simplification and never-derivable propagation to fixpoint
  StateMap sm;
  for (const auto& a : derivable.all) sm.states[a] = AtomState::Maybe;
  for (const auto& f : p.facts) sm.states[f] = AtomState::Fact;

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Rule> kept;
    kept.reserve(rules.size());
    for (auto& r : rules) {
      switch (simplify_rule(r, sm, changed)) {
        case RuleFate::Drop: break;
        case RuleFate::BecameFact: sm.states[*r.head] = AtomState::Fact; break;
        case RuleFate::Keep: kept.push_back(std::move(r)); break;
      }
    }
    rules = std::move(kept);

    // atoms no fact establishes and no remaining rule can derive are never
    // derivable; dropping them can unblock further simplification
    std::set<Atom> supported;
    for (const auto& [a, st] : sm.states)
      if (st == AtomState::Fact) supported.insert(a);
    for (const auto& r : rules)
      if (r.head) supported.insert(*r.head);
    for (auto it = sm.states.begin(); it != sm.states.end();) {
      if (it->second == AtomState::Maybe && !supported.count(it->first)) {
        it = sm.states.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }

  GroundProgram g;
  for (const auto& [a, st] : sm.states)
    if (st == AtomState::Fact) g.facts.insert(a);
  g.rules = finalize_rules(std::move(rules), opts.keep_symmetric);
  return g;
}

/////////////////////////////////////////////////////////////////////////////
// herbrand_instantiate()
/////////////////////////////////////////////////////////////////////////////

namespace {

void collect_constants(const Term& t, std::set<Term>& out) {
  if (t.kind != TermKind::Variable) out.insert(t);
}

void collect_constants(const Atom& a, std::set<Term>& out) {
  for (const auto& t : a.args) collect_constants(t, out);
}

void collect_constants(const Program& p, std::set<Term>& out) {
  for (const auto& f : p.facts) collect_constants(f, out);
  for (const auto& r : p.rules) {
    if (r.head) collect_constants(*r.head, out);
    for (const auto& lit : r.body) {
      if (const auto* a = std::get_if<AtomLiteral>(&lit)) {
        collect_constants(a->atom, out);
      } else if (const auto* b = std::get_if<BuiltinLiteral>(&lit)) {
        collect_constants(b->lhs, out);
        collect_constants(b->rhs, out);
      } else {
        const auto& agg = std::get<AggregateAtom>(lit);
        if (agg.left) collect_constants(agg.left->bound, out);
        if (agg.right) collect_constants(agg.right->bound, out);
        for (const auto& e : agg.elements) {
          for (const auto& t : e.tuple) collect_constants(t, out);
          for (const auto& c : e.condition) {
            if (const auto* a = std::get_if<AtomLiteral>(&c)) {
              collect_constants(a->atom, out);
            } else {
              const auto& b = std::get<BuiltinLiteral>(c);
              collect_constants(b.lhs, out);
              collect_constants(b.rhs, out);
            }
          }
        }
      }
    }
  }
}

// saturating |universe|^vars
size_t assignment_count(size_t universe, size_t vars, size_t cap) {
  size_t n = 1;
  for (size_t i = 0; i < vars; ++i) {
    if (universe != 0 && n > cap / universe) return cap + 1;
    n *= universe;
  }
  return n;
}

//! Enumerate all assignments of `universe` to `vars`, extending `s`.
void for_each_assignment(const std::vector<std::string>& vars,
                         const std::vector<Term>& universe, size_t i, Substitution& s,
                         const std::function<void()>& emit) {
  if (i == vars.size()) { emit(); return; }
  for (const auto& c : universe) {
    s.bindings[vars[i]] = c;
    for_each_assignment(vars, universe, i + 1, s, emit);
  }
  s.bindings.erase(vars[i]);
}

std::vector<std::string> sorted_vars(const std::set<std::string>& s) {
  return {s.begin(), s.end()};
}

} // namespace

GroundProgram herbrand_instantiate(const Program& p, const GroundOptions& opts) {
  std::set<Term> consts;
  collect_constants(p, consts);
  std::vector<Term> universe(consts.begin(), consts.end());

  // reject blowups before enumerating anything
  size_t estimate = 0;
  for (const auto& r : p.rules) {
    std::set<std::string> global;
    if (r.head) collect_variables(*r.head, global);
    std::set<std::string> local_only;
    for (const auto& lit : r.body) {
      if (std::get_if<AggregateAtom>(&lit))
        collect_variables(lit, local_only);
      else
        collect_variables(lit, global);
    }
    // guard bounds are global even though they sit on the aggregate
    for (const auto& lit : r.body)
      if (const auto* agg = std::get_if<AggregateAtom>(&lit)) {
        if (agg->left) collect_variables(agg->left->bound, global);
        if (agg->right) collect_variables(agg->right->bound, global);
      }
    size_t n = assignment_count(universe.size(), global.size(), opts.instance_cap);
    size_t locals = 0;
    for (const auto& v : local_only)
      if (!global.count(v)) ++locals;
    size_t per_rule = assignment_count(universe.size(), locals, opts.instance_cap);
    if (n > opts.instance_cap / (per_rule ? per_rule : 1) ||
        (estimate += n * per_rule) > opts.instance_cap)
      throw UniverseTooLarge(opts.instance_cap);
  }

  InstanceCounter counter(opts.instance_cap);
  GroundProgram g;
  for (const auto& f : p.facts) g.facts.insert(f);

  for (const auto& r : p.rules) {
    std::set<std::string> global;
    if (r.head) collect_variables(*r.head, global);
    for (const auto& lit : r.body) {
      if (const auto* agg = std::get_if<AggregateAtom>(&lit)) {
        if (agg->left) collect_variables(agg->left->bound, global);
        if (agg->right) collect_variables(agg->right->bound, global);
      } else {
        collect_variables(lit, global);
      }
    }

    Substitution s;
    for_each_assignment(sorted_vars(global), universe, 0, s, [&]() {
      counter.bump();
      // rule-level builtins decide the instance
      for (const auto& lit : r.body)
        if (const auto* b = std::get_if<BuiltinLiteral>(&lit))
          if (!eval_cmp(resolve(b->lhs, s), b->op, resolve(b->rhs, s))) return;

      Rule out;
      if (r.head) out.head = apply_substitution(*r.head, s);
      for (const auto& lit : r.body) {
        if (const auto* a = std::get_if<AtomLiteral>(&lit)) {
          out.body.push_back(AtomLiteral{a->negated, apply_substitution(a->atom, s)});
        } else if (std::get_if<AggregateAtom>(&lit)) {
          const auto& agg = std::get<AggregateAtom>(lit);
          AggregateAtom ga;
          if (agg.left) ga.left = Guard{resolve(agg.left->bound, s), agg.left->op};
          if (agg.right) ga.right = Guard{resolve(agg.right->bound, s), agg.right->op};
          std::set<AggregateElement> elems;
          for (const auto& e : agg.elements) {
            std::set<std::string> local;
            for (const auto& t : e.tuple) collect_variables(t, local);
            for (const auto& c : e.condition) collect_variables(c, local);
            for (const auto& kv : s.bindings) local.erase(kv.first);
            Substitution inner = s;
            for_each_assignment(sorted_vars(local), universe, 0, inner, [&]() {
              counter.bump();
              for (const auto& c : e.condition)
                if (const auto* b = std::get_if<BuiltinLiteral>(&c))
                  if (!eval_cmp(resolve(b->lhs, inner), b->op, resolve(b->rhs, inner)))
                    return;
              AggregateElement ge;
              for (const auto& t : e.tuple) ge.tuple.push_back(resolve(t, inner));
              for (const auto& c : e.condition)
                if (const auto* a = std::get_if<AtomLiteral>(&c))
                  ge.condition.push_back(
                      AtomLiteral{a->negated, apply_substitution(a->atom, inner)});
              elems.insert(std::move(ge));
            });
          }
          ga.elements.assign(elems.begin(), elems.end());
          out.body.push_back(std::move(ga));
        }
      }
      g.rules.push_back(std::move(out));
    });
  }
  return g;
}

/////////////////////////////////////////////////////////////////////////////
// Statistics and rendering
/////////////////////////////////////////////////////////////////////////////

std::string render_program(const GroundProgram& g) {
  std::string out;
  for (const auto& f : g.facts) out += render_atom(f) + ".\n";
  for (const auto& r : g.rules) out += render_rule(r) + "\n";
  return out;
}

GroundingStats grounding_stats(const GroundProgram& g, double elapsed_seconds) {
  GroundingStats st;
  st.elapsed_seconds = elapsed_seconds;
  st.rule_count = g.rules.size() + g.facts.size();
  st.atom_occurrences = g.facts.size();
  for (const auto& r : g.rules) {
    if (!r.head) ++st.constraint_count;
    if (r.head) ++st.atom_occurrences;
    for (const auto& lit : r.body) {
      if (std::get_if<AtomLiteral>(&lit)) {
        ++st.atom_occurrences;
      } else if (const auto* agg = std::get_if<AggregateAtom>(&lit)) {
        for (const auto& e : agg->elements)
          for (const auto& c : e.condition)
            if (std::get_if<AtomLiteral>(&c)) ++st.atom_occurrences;
      }
    }
  }
  st.bytes = render_program(g).size();
  return st;
}

} // namespace asptk
