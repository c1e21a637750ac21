#pragma once

#include <optional>

#include "asptk/syntax.hpp"

namespace asptk {

//! Most general unifier of two atoms over flat terms, or nullopt when the
//! atoms do not unify. When a variable of `a` meets a variable of `b`, the
//! `b` side variable is bound, so unifying a rule head against a constraint
//! atom maps the constraint's variables onto the rule's terms.
std::optional<Substitution> unify(const Atom& a, const Atom& b);

} // namespace asptk
