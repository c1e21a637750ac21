#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "asptk/syntax.hpp"

namespace asptk {

enum class ParseErrorKind {
  Syntax,      //!< malformed input
  Unsupported, //!< recognized construct outside the accepted fragment
};

class ParseError : public std::runtime_error {
public:
  ParseError(ParseErrorKind kind, const std::string& message, int line, int column);

  ParseErrorKind kind;
  std::string message; //!< description without the position prefix
  int line;
  int column;
};

//! Parse a program in the accepted fragment: normal rules, constraints and
//! facts over flat terms, with builtin comparisons and #count aggregates.
//! Choice heads, disjunction, arithmetic, intervals, weak constraints and
//! non-count aggregates raise ParseError with kind Unsupported.
Program parse_program(std::string_view text);

//! Parse a whitespace separated list of atoms, as found in model files and
//! on solver output lines. A trailing '.' or ',' after each atom is allowed.
std::vector<Atom> parse_atom_list(std::string_view text);

} // namespace asptk
