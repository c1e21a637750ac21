#include "asptk/printer.hpp"

#include <sstream>

namespace asptk {

namespace {

template <typename Seq, typename Fn>
void join(std::ostringstream& out, const Seq& seq, const char* sep, Fn render) {
  bool first = true;
  for (const auto& item : seq) {
    if (!first) out << sep;
    first = false;
    out << render(item);
  }
}

} // namespace

std::string render_term(const Term& t) {
  if (t.kind == TermKind::Integer) return std::to_string(t.value);
  return t.name;
}

std::string render_atom(const Atom& a) {
  if (a.args.empty()) return a.predicate;
  std::ostringstream out;
  out << a.predicate << '(';
  join(out, a.args, ",", render_term);
  out << ')';
  return out.str();
}

static std::string render_atom_literal(const AtomLiteral& l) {
  if (l.negated) return "not " + render_atom(l.atom);
  return render_atom(l.atom);
}

static std::string render_builtin(const BuiltinLiteral& l) {
  return render_term(l.lhs) + " " + cmp_text(l.op) + " " + render_term(l.rhs);
}

std::string render_literal(const ConditionLiteral& l) {
  if (const auto* a = std::get_if<AtomLiteral>(&l)) return render_atom_literal(*a);
  return render_builtin(std::get<BuiltinLiteral>(l));
}

static std::string render_element(const AggregateElement& e) {
  std::ostringstream out;
  join(out, e.tuple, ",", render_term);
  if (!e.condition.empty()) {
    out << " : ";
    join(out, e.condition, ", ",
         [](const ConditionLiteral& c) { return render_literal(c); });
  }
  return out.str();
}

std::string render_aggregate(const AggregateAtom& a) {
  std::ostringstream out;
  if (a.left) out << render_term(a.left->bound) << ' ' << cmp_text(a.left->op) << ' ';
  out << "#count { ";
  join(out, a.elements, "; ", render_element);
  if (!a.elements.empty()) out << ' ';
  out << '}';
  if (a.right) out << ' ' << cmp_text(a.right->op) << ' ' << render_term(a.right->bound);
  return out.str();
}

std::string render_literal(const Literal& l) {
  if (const auto* a = std::get_if<AtomLiteral>(&l)) return render_atom_literal(*a);
  if (const auto* b = std::get_if<BuiltinLiteral>(&l)) return render_builtin(*b);
  return render_aggregate(std::get<AggregateAtom>(l));
}

std::string render_rule(const Rule& r) {
  std::ostringstream out;
  if (r.head) out << render_atom(*r.head);
  if (!r.body.empty()) {
    if (r.head) out << ' ';
    out << ":- ";
    join(out, r.body, ", ", [](const Literal& l) { return render_literal(l); });
  }
  out << '.';
  return out.str();
}

std::string render_program(const Program& p) {
  std::ostringstream out;
  for (const auto& f : p.facts) out << render_atom(f) << ".\n";
  for (const auto& r : p.rules) out << render_rule(r) << '\n';
  return out.str();
}

} // namespace asptk
