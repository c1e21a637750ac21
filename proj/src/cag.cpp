#include "asptk/cag.hpp"

#include <algorithm>
#include <map>

#include "asptk/printer.hpp"
#include "asptk/unify.hpp"

namespace asptk {

namespace {

bool has_negation(const Rule& r) {
  for (const auto& lit : r.body)
    if (const auto* a = std::get_if<AtomLiteral>(&lit); a && a->negated) return true;
  return false;
}

bool has_aggregate(const Rule& r) {
  for (const auto& lit : r.body)
    if (std::get_if<AggregateAtom>(&lit)) return true;
  return false;
}

std::set<std::string> rule_variables(const Rule& r) {
  std::set<std::string> vars;
  if (r.head) collect_variables(*r.head, vars);
  for (const auto& lit : r.body) collect_variables(lit, vars);
  return vars;
}

} // namespace

GuessCheckPartition guess_check_partition(const Program& p) {
  GuessCheckPartition out;
  for (const auto& r : p.rules) {
    if (r.head && has_negation(r))
      out.guess_rules.push_back(r);
    else
      out.check_rules.push_back(r);
  }
  return out;
}

/////////////////////////////////////////////////////////////////////////////
// Renaming and canonical condition keys
/////////////////////////////////////////////////////////////////////////////

Rule rename_apart(const Rule& r, const std::set<std::string>& used) {
  std::set<std::string> own = rule_variables(r);
  std::set<std::string> taken = used;
  taken.insert(own.begin(), own.end());

  Substitution renaming;
  for (const auto& v : own) {
    if (!used.count(v)) continue;
    for (int k = 1;; ++k) {
      std::string fresh = v + std::to_string(k);
      if (!taken.count(fresh)) {
        renaming.bindings[v] = Term::variable(fresh);
        taken.insert(fresh);
        break;
      }
    }
  }
  return renaming.empty() ? r : apply_substitution(r, renaming);
}

namespace {

// orientation-insensitive builtin form: >,>= mirrored to <,<=; =,<> with
// operands in canonical order
BuiltinLiteral normalize_builtin(BuiltinLiteral b) {
  if (b.op == CmpOp::Gt || b.op == CmpOp::Ge) {
    std::swap(b.lhs, b.rhs);
    b.op = mirror_cmp(b.op);
  } else if ((b.op == CmpOp::Eq || b.op == CmpOp::Ne) && b.rhs < b.lhs) {
    std::swap(b.lhs, b.rhs);
  }
  return b;
}

std::string render_normalized(const std::vector<Literal>& literals) {
  std::vector<std::string> parts;
  for (const auto& lit : literals) {
    if (const auto* b = std::get_if<BuiltinLiteral>(&lit))
      parts.push_back(render_literal(Literal{normalize_builtin(*b)}));
    else
      parts.push_back(render_literal(lit));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& s : parts) { out += s; out += '\n'; }
  return out;
}

std::vector<Literal> rename_locals(const std::vector<Literal>& literals,
                                   const std::vector<std::string>& locals,
                                   const std::vector<size_t>& perm) {
  Substitution s;
  for (size_t i = 0; i < locals.size(); ++i)
    s.bindings[locals[i]] = Term::variable("#" + std::to_string(perm[i]));
  std::vector<Literal> out;
  out.reserve(literals.size());
  for (const auto& lit : literals) out.push_back(apply_substitution(lit, s));
  return out;
}

} // namespace

std::string canonical_condition_key(const std::vector<Literal>& literals,
                                    const std::set<std::string>& protected_vars) {
  std::set<std::string> vars;
  for (const auto& lit : literals) collect_variables(lit, vars);
  std::vector<std::string> locals;
  for (const auto& v : vars)
    if (!protected_vars.count(v)) locals.push_back(v);

  constexpr size_t kPermCap = 6;
  if (locals.size() > kPermCap) {
    // too many locals to canonicalize exactly; number by first occurrence
    std::vector<size_t> ident(locals.size());
    for (size_t i = 0; i < ident.size(); ++i) ident[i] = i;
    return render_normalized(rename_locals(literals, locals, ident));
  }

  std::vector<size_t> perm(locals.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::string best;
  do {
    std::string key = render_normalized(rename_locals(literals, locals, perm));
    if (best.empty() || key < best) best = std::move(key);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/////////////////////////////////////////////////////////////////////////////
// Filter conditions
/////////////////////////////////////////////////////////////////////////////

std::vector<FilterCondition> filter_conditions(const Rule& r, const Program& p) {
  std::vector<FilterCondition> out;
  if (!r.head) return out;
  std::set<std::string> rule_vars = rule_variables(r);
  std::set<std::string> seen_keys;

  for (const auto& c : p.rules) {
    if (!c.is_constraint()) continue;
    Rule cr = rename_apart(c, rule_vars);
    for (size_t i = 0; i < cr.body.size(); ++i) {
      const auto* a = std::get_if<AtomLiteral>(&cr.body[i]);
      if (!a || a->negated) continue;
      auto gamma = unify(*r.head, a->atom);
      if (!gamma) continue;
      // a binding of the rule's own variables would make the filter fire on
      // guesses the constraint does not even talk about; skip such matches
      bool binds_rule_var = false;
      for (const auto& kv : gamma->bindings)
        if (rule_vars.count(kv.first)) { binds_rule_var = true; break; }
      if (binds_rule_var) continue;

      FilterCondition fc;
      fc.source_constraint = cr;
      fc.matched_atom_index = i;
      fc.unifier = *gamma;
      for (size_t j = 0; j < cr.body.size(); ++j)
        if (j != i) fc.literals.push_back(apply_substitution(cr.body[j], *gamma));

      std::string key = canonical_condition_key(fc.literals, rule_vars);
      if (seen_keys.insert(std::move(key)).second) out.push_back(std::move(fc));
    }
  }
  return out;
}

std::optional<Literal> negate_condition(const FilterCondition& fc, std::string* skip_reason) {
  size_t aggregates = 0;
  for (const auto& lit : fc.literals)
    if (std::get_if<AggregateAtom>(&lit)) ++aggregates;

  if (aggregates == 0) {
    AggregateAtom agg;
    agg.left = Guard{Term::integer(1), CmpOp::Gt}; // 1 > #count{...}, i.e. count < 1
    AggregateElement e;
    e.tuple.push_back(Term::integer(1));
    for (const auto& lit : fc.literals) {
      if (const auto* a = std::get_if<AtomLiteral>(&lit))
        e.condition.push_back(*a);
      else
        e.condition.push_back(std::get<BuiltinLiteral>(lit));
    }
    agg.elements.push_back(std::move(e));
    return Literal{std::move(agg)};
  }

  if (aggregates == 1 && fc.literals.size() == 1) {
    AggregateAtom agg = std::get<AggregateAtom>(fc.literals[0]);
    if (agg.left && agg.right) {
      if (skip_reason)
        *skip_reason = "two-sided guard negates into a disjunction";
      return std::nullopt;
    }
    if (!agg.left && !agg.right) {
      if (skip_reason) *skip_reason = "aggregate without a guard is always true";
      return std::nullopt;
    }
    if (agg.right) {
      agg.left = Guard{agg.right->bound, mirror_cmp(agg.right->op)};
      agg.right.reset();
    }
    agg.left->op = negate_cmp(agg.left->op);
    return Literal{std::move(agg)};
  }

  if (skip_reason)
    *skip_reason = "condition mixes an aggregate with other literals";
  return std::nullopt;
}

/////////////////////////////////////////////////////////////////////////////
// Constraint unfolding
/////////////////////////////////////////////////////////////////////////////

namespace {

// definitions: rules with a head and neither negation nor aggregates
std::vector<const Rule*> definition_rules(const Program& p) {
  std::vector<const Rule*> defs;
  for (const auto& r : p.rules)
    if (r.head && !has_negation(r) && !has_aggregate(r)) defs.push_back(&r);
  return defs;
}

bool any_definition_applies(const Rule& c, const std::vector<const Rule*>& defs) {
  std::set<std::string> cvars = rule_variables(c);
  for (const auto& lit : c.body) {
    const auto* a = std::get_if<AtomLiteral>(&lit);
    if (!a || a->negated) continue;
    for (const Rule* d : defs) {
      Rule dr = rename_apart(*d, cvars);
      if (unify(a->atom, *dr.head).has_value()) return true;
    }
  }
  return false;
}

} // namespace

std::vector<Rule> unfold_constraints(const Program& p, size_t depth) {
  std::vector<const Rule*> defs = definition_rules(p);
  std::vector<Rule> work;
  std::set<std::string> original_keys;
  for (const auto& r : p.rules) {
    if (!r.is_constraint() || has_aggregate(r)) continue;
    work.push_back(r);
    original_keys.insert(canonical_condition_key(r.body, {}));
  }

  std::vector<Rule> candidates;
  for (size_t level = 0; level < depth; ++level) {
    std::vector<Rule> next;
    for (const auto& c : work) {
      std::set<std::string> cvars = rule_variables(c);
      for (size_t i = 0; i < c.body.size(); ++i) {
        const auto* a = std::get_if<AtomLiteral>(&c.body[i]);
        if (!a || a->negated) continue;
        for (const Rule* d : defs) {
          Rule dr = rename_apart(*d, cvars);
          auto gamma = unify(a->atom, *dr.head);
          if (!gamma) continue;
          Rule derived;
          for (size_t j = 0; j < c.body.size(); ++j)
            if (j != i) derived.body.push_back(apply_substitution(c.body[j], *gamma));
          for (const auto& lit : dr.body)
            derived.body.push_back(apply_substitution(lit, *gamma));
          next.push_back(std::move(derived));
        }
      }
    }
    candidates.insert(candidates.end(), next.begin(), next.end());
    work = std::move(next);
  }

  // keep only fully unfolded constraints that are genuinely new
  std::vector<Rule> out;
  std::set<std::string> seen = original_keys;
  for (auto& c : candidates) {
    if (any_definition_applies(c, defs)) continue;
    std::string key = canonical_condition_key(c.body, {});
    if (seen.insert(std::move(key)).second) out.push_back(std::move(c));
  }
  return out;
}

/////////////////////////////////////////////////////////////////////////////
// The rewriting
/////////////////////////////////////////////////////////////////////////////

Program cag_rewrite(const Program& p, const RewriteOptions& opts, RewriteReport* report) {
  Program augmented = p;
  std::vector<Rule> derived = unfold_constraints(p, opts.unfold_depth);
  for (const auto& c : derived) augmented.rules.push_back(c);
  if (report) report->derived_constraints = derived;

  // head predicates worth rewriting: those some constraint mentions as a
  // positive plain atom
  std::set<std::string> constrained;
  for (const auto& r : augmented.rules) {
    if (!r.is_constraint()) continue;
    for (const auto& lit : r.body)
      if (const auto* a = std::get_if<AtomLiteral>(&lit); a && !a->negated)
        constrained.insert(a->atom.predicate);
  }

  Program out;
  out.facts = p.facts;
  for (const auto& r : p.rules) {
    bool is_guess = r.head && has_negation(r);
    bool targeted = is_guess && (opts.target_predicates
                                     ? opts.target_predicates->count(r.head->predicate) > 0
                                     : constrained.count(r.head->predicate) > 0);
    if (!targeted) {
      out.rules.push_back(r);
      continue;
    }

    FilteredRule fr;
    fr.base = r;
    RewriteReport::Entry entry;
    entry.base = r;
    for (auto& fc : filter_conditions(r, augmented)) {
      std::string reason;
      if (auto lit = negate_condition(fc, &reason)) {
        fr.added_filters.push_back(std::move(*lit));
        if (report) entry.applied.push_back(std::move(fc));
      } else {
        if (report) {
          report->warnings.push_back("skipped a filter for " + r.head->predicate + ": " +
                                     reason);
          entry.skipped.emplace_back(std::move(fc), reason);
        }
      }
    }
    out.rules.push_back(fr.combined());
    if (report) report->entries.push_back(std::move(entry));
  }
  return out;
}

} // namespace asptk
