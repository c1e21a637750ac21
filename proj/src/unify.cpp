#include "asptk/unify.hpp"

namespace asptk {

namespace {

// Chase a term through the bindings built so far. Terms are flat and new
// bindings are added fully resolved on both sides, so chains stay acyclic.
Term walk(Term t, const Substitution& s) {
  while (t.kind == TermKind::Variable) {
    const Term* next = s.find(t.name);
    if (!next) return t;
    t = *next;
  }
  return t;
}

} // namespace

std::optional<Substitution> unify(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate || a.args.size() != b.args.size()) return std::nullopt;
  Substitution s;
  for (size_t i = 0; i < a.args.size(); ++i) {
    Term ta = walk(a.args[i], s);
    Term tb = walk(b.args[i], s);
    if (ta == tb) continue;
    if (tb.kind == TermKind::Variable)
      s.bindings[tb.name] = ta;
    else if (ta.kind == TermKind::Variable)
      s.bindings[ta.name] = tb;
    else
      return std::nullopt;
  }
  for (auto& [var, t] : s.bindings) t = walk(t, s);
  return s;
}

} // namespace asptk
