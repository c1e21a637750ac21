#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace asptk {

enum class TermKind : std::uint8_t { Integer, Symbol, Variable };

//! A term of the input language: an integer, a constant symbol (lowercase
//! identifier), or a variable (uppercase identifier). There are no compound
//! terms. The defaulted ordering places all integers before all symbols and
//! all symbols before all variables; integers compare numerically, names
//! lexicographically. Builtin comparisons use the same order.
struct Term {
    TermKind kind = TermKind::Symbol;
    std::string name;    // spelling of a symbol or variable, empty for integers
    long long value = 0; // integer payload

    static Term variable(std::string n) { return {TermKind::Variable, std::move(n), 0}; }
    static Term symbol(std::string n) { return {TermKind::Symbol, std::move(n), 0}; }
    static Term integer(long long v) { return {TermKind::Integer, {}, v}; }

    bool is_variable() const { return kind == TermKind::Variable; }
    bool is_ground() const { return kind != TermKind::Variable; }

    friend auto operator<=>(const Term&, const Term&) = default;
};

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    std::size_t arity() const { return args.size(); }
    bool is_ground() const;

    friend auto operator<=>(const Atom&, const Atom&) = default;
};

enum class CmpOp : std::uint8_t { Lt, Le, Gt, Ge, Eq, Ne };

const char* cmp_text(CmpOp op);
//! Logical negation: < <-> >=, <= <-> >, = <-> <>.
CmpOp negate_cmp(CmpOp op);
//! Operand swap: a op b holds iff b mirror(op) a holds.
CmpOp mirror_cmp(CmpOp op);
//! Evaluates a comparison of two ground terms under the total term order.
bool eval_cmp(const Term& lhs, CmpOp op, const Term& rhs);

//! Plain atom occurrence, positive or default-negated.
struct AtomLiteral {
    bool negated = false;
    Atom atom;

    friend auto operator<=>(const AtomLiteral&, const AtomLiteral&) = default;
};

struct BuiltinLiteral {
    Term lhs;
    CmpOp op = CmpOp::Lt;
    Term rhs;

    friend auto operator<=>(const BuiltinLiteral&, const BuiltinLiteral&) = default;
};

//! Literals allowed inside aggregate element conditions: no nested aggregates.
using ConditionLiteral = std::variant<AtomLiteral, BuiltinLiteral>;

struct AggregateElement {
    std::vector<Term> tuple;                 // nonempty
    std::vector<ConditionLiteral> condition; // may be empty

    friend auto operator<=>(const AggregateElement&, const AggregateElement&) = default;
};

//! One side of an aggregate guard. On the left the bound precedes the
//! aggregate (bound op count), on the right it follows (count op bound).
struct Guard {
    Term bound;
    CmpOp op = CmpOp::Lt;

    friend auto operator<=>(const Guard&, const Guard&) = default;
};

//! A #count aggregate with at least one guard. Right-only guards are
//! normalized to the left side at parse time; both sides may be present.
struct AggregateAtom {
    std::optional<Guard> left;
    std::vector<AggregateElement> elements;
    std::optional<Guard> right;

    friend auto operator<=>(const AggregateAtom&, const AggregateAtom&) = default;
};

using Literal = std::variant<AtomLiteral, BuiltinLiteral, AggregateAtom>;

struct Rule {
    std::optional<Atom> head; // empty for constraints
    std::vector<Literal> body;

    bool is_constraint() const { return !head.has_value(); }

    friend auto operator<=>(const Rule&, const Rule&) = default;
};

struct Program {
    std::vector<Rule> rules;
    std::vector<Atom> facts; // variable-free

    friend auto operator<=>(const Program&, const Program&) = default;
};

//! Finite idempotent map from variable names to terms.
struct Substitution {
    std::map<std::string, Term> bindings;

    bool empty() const { return bindings.empty(); }
    const Term* find(const std::string& var) const;

    friend auto operator<=>(const Substitution&, const Substitution&) = default;
};

Term apply_substitution(const Term& t, const Substitution& s);
Atom apply_substitution(const Atom& a, const Substitution& s);
AtomLiteral apply_substitution(const AtomLiteral& l, const Substitution& s);
BuiltinLiteral apply_substitution(const BuiltinLiteral& l, const Substitution& s);
ConditionLiteral apply_substitution(const ConditionLiteral& l, const Substitution& s);
AggregateElement apply_substitution(const AggregateElement& e, const Substitution& s);
AggregateAtom apply_substitution(const AggregateAtom& a, const Substitution& s);
Literal apply_substitution(const Literal& l, const Substitution& s);
Rule apply_substitution(const Rule& r, const Substitution& s);

void collect_variables(const Term& t, std::set<std::string>& out);
void collect_variables(const Atom& a, std::set<std::string>& out);
void collect_variables(const AtomLiteral& l, std::set<std::string>& out);
void collect_variables(const BuiltinLiteral& l, std::set<std::string>& out);
void collect_variables(const ConditionLiteral& l, std::set<std::string>& out);
void collect_variables(const AggregateElement& e, std::set<std::string>& out);
void collect_variables(const AggregateAtom& a, std::set<std::string>& out);
void collect_variables(const Literal& l, std::set<std::string>& out);
void collect_variables(const Rule& r, std::set<std::string>& out);

enum class Tri : std::uint8_t { False, True, Unknown };

//! Evaluates the guards of an aggregate against an exact element count.
bool guards_hold(const std::optional<Guard>& left, const std::optional<Guard>& right,
                 long long count);

//! Evaluates the guards against every count in [lo, hi]: True when all counts
//! satisfy them, False when none does, Unknown otherwise.
Tri guards_over_range(const std::optional<Guard>& left, const std::optional<Guard>& right,
                      long long lo, long long hi);

} // namespace asptk
