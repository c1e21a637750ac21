#include "asptk/safety.hpp"

#include <set>

#include "asptk/printer.hpp"

namespace asptk {

namespace {

using VarSet = std::set<std::string>;

void add_vars(const Term& t, VarSet& out) {
  if (t.kind == TermKind::Variable) out.insert(t.name);
}

void add_vars(const Atom& a, VarSet& out) {
  for (const auto& t : a.args) add_vars(t, out);
}

struct RuleChecker {
  const Rule& rule;
  std::vector<SafetyViolation>& out;
  VarSet global; // bound by positive plain body atoms

  RuleChecker(const Rule& r, std::vector<SafetyViolation>& sink) : rule(r), out(sink) {
    for (const auto& lit : r.body)
      if (const auto* a = std::get_if<AtomLiteral>(&lit); a && !a->negated)
        add_vars(a->atom, global);
  }

  void require(const VarSet& bound, const Term& t, const std::string& place) {
    if (t.kind == TermKind::Variable && !bound.count(t.name))
      out.push_back({t.name, place + " of '" + render_rule(rule) + "'"});
  }

  void require(const VarSet& bound, const Atom& a, const std::string& place) {
    for (const auto& t : a.args) require(bound, t, place);
  }

  void check() {
    if (rule.head) require(global, *rule.head, "head");
    for (const auto& lit : rule.body) {
      if (const auto* a = std::get_if<AtomLiteral>(&lit)) {
        if (a->negated) require(global, a->atom, "negated atom");
      } else if (const auto* b = std::get_if<BuiltinLiteral>(&lit)) {
        require(global, b->lhs, "builtin");
        require(global, b->rhs, "builtin");
      } else {
        check_aggregate(std::get<AggregateAtom>(lit));
      }
    }
  }

  void check_aggregate(const AggregateAtom& agg) {
    if (agg.left) require(global, agg.left->bound, "aggregate guard");
    if (agg.right) require(global, agg.right->bound, "aggregate guard");
    for (const auto& e : agg.elements) {
      VarSet local = global;
      for (const auto& c : e.condition)
        if (const auto* a = std::get_if<AtomLiteral>(&c); a && !a->negated)
          add_vars(a->atom, local);
      for (const auto& t : e.tuple) require(local, t, "aggregate element tuple");
      for (const auto& c : e.condition) {
        if (const auto* a = std::get_if<AtomLiteral>(&c)) {
          if (a->negated) require(local, a->atom, "negated condition atom");
        } else {
          const auto& b = std::get<BuiltinLiteral>(c);
          require(local, b.lhs, "condition builtin");
          require(local, b.rhs, "condition builtin");
        }
      }
    }
  }
};

} // namespace

std::vector<SafetyViolation> check_safety(const Program& p) {
  std::vector<SafetyViolation> out;
  for (const auto& r : p.rules) RuleChecker(r, out).check();
  return out;
}

} // namespace asptk
