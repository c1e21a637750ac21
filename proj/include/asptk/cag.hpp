#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asptk/syntax.hpp"

namespace asptk {

//! Guess rules are the choice-generating rules: nonempty head plus at least
//! one default-negated body atom. Everything else (constraints, positive
//! definitions) is a check rule.
struct GuessCheckPartition {
  std::vector<Rule> guess_rules;
  std::vector<Rule> check_rules;
};

GuessCheckPartition guess_check_partition(const Program& p);

//! One reason a guessed atom cannot be part of any solution: the matched
//! constraint's remaining body under the unifier. Appending the negation of
//! such a condition to the guess rule prunes the guess at ground time.
struct FilterCondition {
  std::vector<Literal> literals;
  Rule source_constraint; //!< renamed apart from the target rule
  size_t matched_atom_index;
  Substitution unifier;
};

struct FilteredRule {
  Rule base;
  std::vector<Literal> added_filters;

  Rule combined() const {
    Rule r = base;
    for (const auto& f : added_filters) r.body.push_back(f);
    return r;
  }
};

//! All filter conditions for rule r against the constraints of p. Matches
//! head(r) against each positive plain body atom of each constraint; the
//! unifier maps constraint variables onto rule terms. A match that would
//! bind a variable of r itself is skipped (it would over-prune). Conditions
//! equivalent up to renaming of their local variables are deduplicated.
std::vector<FilterCondition> filter_conditions(const Rule& r, const Program& p);

//! Negation of a filter condition as a single body literal:
//! a plain condition becomes `1 > #count { 1 : condition }`; a condition
//! that is exactly one aggregate gets its guard comparison negated. Mixed
//! or unnegatable conditions yield nullopt with a reason.
std::optional<Literal> negate_condition(const FilterCondition& fc,
                                        std::string* skip_reason = nullptr);

//! Derived constraints: replace a positive atom of an aggregate-free
//! constraint with the body of a positive definition whose head unifies,
//! up to `depth` times. Only fully unfolded results (no remaining atom that
//! a definition could expand) are returned; they serve as filter sources
//! and are never added to the emitted program.
std::vector<Rule> unfold_constraints(const Program& p, size_t depth);

struct RewriteOptions {
  size_t unfold_depth = 2;
  //! When set, only guess rules with these head predicates are rewritten.
  //! Otherwise every guess rule whose head predicate occurs positively in
  //! some (original or derived) constraint body is rewritten.
  std::optional<std::set<std::string>> target_predicates;
};

struct RewriteReport {
  struct Entry {
    Rule base;
    std::vector<FilterCondition> applied;
    std::vector<std::pair<FilterCondition, std::string>> skipped;
  };
  std::vector<Entry> entries;
  std::vector<Rule> derived_constraints;
  std::vector<std::string> warnings;
};

//! The whole rewriting: partition, derive filter conditions (including from
//! unfolded constraints), negate them, and append them to their guess
//! rules. Rules that are not rewritten pass through unchanged, in order.
Program cag_rewrite(const Program& p, const RewriteOptions& opts = {},
                    RewriteReport* report = nullptr);

//! Canonical fingerprint of a condition: local variables (those not in
//! `protected_vars`) are renumbered over all permutations up to a small
//! arity, builtin orientation is normalized, literal renders are sorted,
//! and the lexicographic minimum is taken. Conditions equal up to local
//! renaming get equal keys.
std::string canonical_condition_key(const std::vector<Literal>& literals,
                                    const std::set<std::string>& protected_vars);

//! Rename the variables of r that occur in `used` to fresh names with the
//! smallest free numeric suffix.
Rule rename_apart(const Rule& r, const std::set<std::string>& used);

} // namespace asptk
