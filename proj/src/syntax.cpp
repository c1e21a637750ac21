#include "asptk/syntax.hpp"

#include <algorithm>
#include <stdexcept>

namespace asptk {

bool Atom::is_ground() const {
    return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

const char* cmp_text(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "<>";
    }
    return "?";
}

CmpOp negate_cmp(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return CmpOp::Ge;
        case CmpOp::Le: return CmpOp::Gt;
        case CmpOp::Gt: return CmpOp::Le;
        case CmpOp::Ge: return CmpOp::Lt;
        case CmpOp::Eq: return CmpOp::Ne;
        case CmpOp::Ne: return CmpOp::Eq;
    }
    return op;
}

CmpOp mirror_cmp(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return CmpOp::Gt;
        case CmpOp::Le: return CmpOp::Ge;
        case CmpOp::Gt: return CmpOp::Lt;
        case CmpOp::Ge: return CmpOp::Le;
        case CmpOp::Eq: return CmpOp::Eq;
        case CmpOp::Ne: return CmpOp::Ne;
    }
    return op;
}

bool eval_cmp(const Term& lhs, CmpOp op, const Term& rhs) {
    if (lhs.is_variable() || rhs.is_variable()) {
        throw std::invalid_argument("eval_cmp: non-ground operand");
    }
    auto c = lhs <=> rhs;
    switch (op) {
        case CmpOp::Lt: return c < 0;
        case CmpOp::Le: return c <= 0;
        case CmpOp::Gt: return c > 0;
        case CmpOp::Ge: return c >= 0;
        case CmpOp::Eq: return c == 0;
        case CmpOp::Ne: return c != 0;
    }
    return false;
}

const Term* Substitution::find(const std::string& var) const {
    auto it = bindings.find(var);
    return it == bindings.end() ? nullptr : &it->second;
}

Term apply_substitution(const Term& t, const Substitution& s) {
    if (t.is_variable()) {
        if (const Term* bound = s.find(t.name)) return *bound;
    }
    return t;
}

Atom apply_substitution(const Atom& a, const Substitution& s) {
    Atom out{a.predicate, {}};
    out.args.reserve(a.args.size());
    for (const Term& t : a.args) out.args.push_back(apply_substitution(t, s));
    return out;
}

AtomLiteral apply_substitution(const AtomLiteral& l, const Substitution& s) {
    return {l.negated, apply_substitution(l.atom, s)};
}

BuiltinLiteral apply_substitution(const BuiltinLiteral& l, const Substitution& s) {
    return {apply_substitution(l.lhs, s), l.op, apply_substitution(l.rhs, s)};
}

ConditionLiteral apply_substitution(const ConditionLiteral& l, const Substitution& s) {
    if (const auto* al = std::get_if<AtomLiteral>(&l)) return apply_substitution(*al, s);
    return apply_substitution(std::get<BuiltinLiteral>(l), s);
}

AggregateElement apply_substitution(const AggregateElement& e, const Substitution& s) {
    AggregateElement out;
    out.tuple.reserve(e.tuple.size());
    for (const Term& t : e.tuple) out.tuple.push_back(apply_substitution(t, s));
    out.condition.reserve(e.condition.size());
    for (const ConditionLiteral& c : e.condition) out.condition.push_back(apply_substitution(c, s));
    return out;
}

AggregateAtom apply_substitution(const AggregateAtom& a, const Substitution& s) {
    AggregateAtom out;
    if (a.left) out.left = Guard{apply_substitution(a.left->bound, s), a.left->op};
    if (a.right) out.right = Guard{apply_substitution(a.right->bound, s), a.right->op};
    out.elements.reserve(a.elements.size());
    for (const AggregateElement& e : a.elements) out.elements.push_back(apply_substitution(e, s));
    return out;
}

Literal apply_substitution(const Literal& l, const Substitution& s) {
    if (const auto* al = std::get_if<AtomLiteral>(&l)) return apply_substitution(*al, s);
    if (const auto* bl = std::get_if<BuiltinLiteral>(&l)) return apply_substitution(*bl, s);
    return apply_substitution(std::get<AggregateAtom>(l), s);
}

Rule apply_substitution(const Rule& r, const Substitution& s) {
    Rule out;
    if (r.head) out.head = apply_substitution(*r.head, s);
    out.body.reserve(r.body.size());
    for (const Literal& l : r.body) out.body.push_back(apply_substitution(l, s));
    return out;
}

void collect_variables(const Term& t, std::set<std::string>& out) {
    if (t.is_variable()) out.insert(t.name);
}

void collect_variables(const Atom& a, std::set<std::string>& out) {
    for (const Term& t : a.args) collect_variables(t, out);
}

void collect_variables(const AtomLiteral& l, std::set<std::string>& out) {
    collect_variables(l.atom, out);
}

void collect_variables(const BuiltinLiteral& l, std::set<std::string>& out) {
    collect_variables(l.lhs, out);
    collect_variables(l.rhs, out);
}

void collect_variables(const ConditionLiteral& l, std::set<std::string>& out) {
    std::visit([&](const auto& x) { collect_variables(x, out); }, l);
}

void collect_variables(const AggregateElement& e, std::set<std::string>& out) {
    for (const Term& t : e.tuple) collect_variables(t, out);
    for (const ConditionLiteral& c : e.condition) collect_variables(c, out);
}

void collect_variables(const AggregateAtom& a, std::set<std::string>& out) {
    if (a.left) collect_variables(a.left->bound, out);
    if (a.right) collect_variables(a.right->bound, out);
    for (const AggregateElement& e : a.elements) collect_variables(e, out);
}

void collect_variables(const Literal& l, std::set<std::string>& out) {
    std::visit([&](const auto& x) { collect_variables(x, out); }, l);
}

void collect_variables(const Rule& r, std::set<std::string>& out) {
    if (r.head) collect_variables(*r.head, out);
    for (const Literal& l : r.body) collect_variables(l, out);
}

bool guards_hold(const std::optional<Guard>& left, const std::optional<Guard>& right,
                 long long count) {
    Term c = Term::integer(count);
    if (left && !eval_cmp(left->bound, left->op, c)) return false;
    if (right && !eval_cmp(c, right->op, right->bound)) return false;
    return true;
}

Tri guards_over_range(const std::optional<Guard>& left, const std::optional<Guard>& right,
                      long long lo, long long hi) {
    if (lo > hi) throw std::invalid_argument("guards_over_range: empty range");
    // Bounded scan; ranges are bounded by an aggregate's element count.
    constexpr long long kScanCap = 200000;
    if (hi - lo > kScanCap) return Tri::Unknown;
    bool any = false, all = true;
    for (long long c = lo; c <= hi; ++c) {
        if (guards_hold(left, right, c)) any = true;
        else all = false;
        if (any && !all) return Tri::Unknown;
    }
    if (all) return Tri::True;
    return any ? Tri::Unknown : Tri::False;
}

} // namespace asptk
