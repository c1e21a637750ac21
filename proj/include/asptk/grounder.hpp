#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "asptk/syntax.hpp"

namespace asptk {

//! Variable-free program. Rules carry no builtins (those are evaluated away
//! while grounding); facts are the atoms proven true during grounding.
struct GroundProgram {
  std::vector<Rule> rules;
  std::set<Atom> facts;
};

struct GroundOptions {
  //! Abort threshold on the number of produced rule and element instances.
  size_t instance_cap = 10'000'000;
  //! Keep body literal order as instantiated. By default bodies are sorted
  //! into a canonical order first, which merges rules that differ only in
  //! literal order (such as the two orientations of a symmetric constraint).
  bool keep_symmetric = false;
};

class UniverseTooLarge : public std::runtime_error {
public:
  explicit UniverseTooLarge(size_t limit_);
  size_t limit;
};

struct GroundingStats {
  size_t rule_count = 0;       //!< ground rules including facts
  size_t constraint_count = 0; //!< rules without a head
  size_t atom_occurrences = 0; //!< plain atom occurrences, conditions included
  size_t bytes = 0;            //!< length of the canonical rendering
  double elapsed_seconds = 0.0;
};

//! Brute-force reference: instantiate every rule with every assignment of
//! program constants to its variables, evaluate builtins, and stop there.
//! Serves as the oracle the simplifying instantiator is checked against.
GroundProgram herbrand_instantiate(const Program& p, const GroundOptions& opts = {});

//! Bottom-up instantiation over derivable atoms followed by iterated
//! simplification. Preserves the answer sets of the input. The derivability
//! overapproximation treats negation and aggregates as true and evaluates
//! builtins, so every atom a stable model could contain is covered.
GroundProgram ground(const Program& p, const GroundOptions& opts = {});

GroundingStats grounding_stats(const GroundProgram& g, double elapsed_seconds = 0.0);

std::string render_program(const GroundProgram& g);

} // namespace asptk
