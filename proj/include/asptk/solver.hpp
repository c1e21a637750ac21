#pragma once

#include <chrono>
#include <set>
#include <stdexcept>
#include <vector>

#include "asptk/grounder.hpp"
#include "asptk/syntax.hpp"

namespace asptk {

struct Interpretation {
  std::set<Atom> true_atoms; // every other atom is false
};

struct AnswerSet {
  std::set<Atom> atoms;
  auto operator<=>(const AnswerSet&) const = default;
};

//! Count of distinct element tuples whose condition holds in i, compared
//! against the guards.
bool eval_aggregate(const AggregateAtom& agg, const Interpretation& i);

//! True iff i violates no constraint and equals the least model of the
//! reduct of g with respect to i. Aggregate literals are pre-evaluated
//! under i and replaced by their truth value before the reduct is taken.
bool check_stable(const GroundProgram& g, const Interpretation& i);

struct SolveOptions {
  size_t max_models = 0;                //!< 0 enumerates all models
  std::chrono::milliseconds timeout{0}; //!< 0 means no budget
};

class SolveTimeout : public std::runtime_error {
public:
  explicit SolveTimeout(double elapsed_seconds_);
  double elapsed_seconds;
};

class TooManyAtoms : public std::runtime_error {
public:
  TooManyAtoms(size_t count_, size_t cap_);
  size_t count;
  size_t cap;
};

//! Complete enumeration: backtracking over the atoms whose truth the least
//! model cannot decide (atoms under default negation and atoms inside
//! aggregate conditions), with unit-style propagation. Every emitted set
//! passes check_stable before it is returned.
std::vector<AnswerSet> solve(const GroundProgram& g, const SolveOptions& opts = {});

//! Oracle: test every subset of the program's atoms with check_stable.
//! Rejects programs with more than 24 distinct atoms.
std::vector<AnswerSet> enumerate_brute_force(const GroundProgram& g);

} // namespace asptk
