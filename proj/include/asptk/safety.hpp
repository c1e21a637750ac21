#pragma once

#include <string>
#include <vector>

#include "asptk/syntax.hpp"

namespace asptk {

struct SafetyViolation {
  std::string variable;
  std::string where; //!< where the unbound occurrence sits, with the rule text
};

//! A rule is safe when every variable in its head, in negated atoms, in
//! builtins and in guard bounds is bound by some positive body atom, and
//! every variable local to an aggregate element is bound by a positive atom
//! of that element's condition or by the rule body. Returns one entry per
//! unbound variable occurrence; empty means the program is safe.
std::vector<SafetyViolation> check_safety(const Program& p);

} // namespace asptk
