#pragma once

#include <string>

#include "asptk/syntax.hpp"

namespace asptk {

//! Canonical text forms. One rule per line, a single space after commas that
//! separate literals, no spaces inside argument lists, aggregate guards on
//! the left where only one guard is present.
std::string render_term(const Term& t);
std::string render_atom(const Atom& a);
std::string render_literal(const Literal& l);
std::string render_literal(const ConditionLiteral& l);
std::string render_aggregate(const AggregateAtom& a);
std::string render_rule(const Rule& r);
std::string render_program(const Program& p);

} // namespace asptk
