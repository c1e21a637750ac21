#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "asptk/grounder.hpp"
#include "asptk/solver.hpp"
#include "asptk/syntax.hpp"

namespace asptk {

enum class EngineStatus { Sat, Unsat, Timeout };

//! Outcome of one stateless engine call. `ground_seconds`/`solve_seconds`
//! split the engine's own time where it can tell (an external process
//! usually cannot, then everything lands in solve_seconds). `stats`
//! describes the grounding the engine produced, when it knows it.
struct EngineResult {
  EngineStatus status = EngineStatus::Unsat;
  AnswerSet model; // meaningful only for Sat
  double ground_seconds = 0.0;
  double solve_seconds = 0.0;
  std::optional<GroundingStats> stats;
};

//! A solving engine takes a complete program and returns its first answer
//! set. Each call stands alone: no state survives between invocations.
using SolveEngine = std::function<EngineResult(const Program&)>;

//! Engine backed by the in-process grounder and solver. With a deadline the
//! call stops at the deadline and reports Timeout; grounding overruns count
//! against the same budget.
SolveEngine make_internal_engine(
    GroundOptions gopts = {},
    std::optional<std::chrono::steady_clock::time_point> deadline = {});

struct FactBatch {
  int index = 0; // 1-based, consecutive within a plan
  std::vector<Atom> facts;
};

struct IterationTrace {
  int index = 0;
  size_t input_fact_count = 0; //!< previous model's atoms merged with the batch
  GroundingStats stats;
  double solve_seconds = 0.0;
  size_t answer_set_size = 0;
  EngineStatus status = EngineStatus::Sat;
};

struct IncrementalResult {
  AnswerSet final_model;
  std::vector<IterationTrace> traces;
  //! Filled when verify_final was requested: whether the final model is a
  //! stable model of the encoding joined with every batch's facts.
  std::optional<bool> final_verified;
};

//! The favorable-case assumption failed: some iteration had no answer set.
//! Carries the traces gathered up to and including the failing iteration.
class IterationUnsat : public std::runtime_error {
public:
  IterationUnsat(int index_, std::vector<IterationTrace> traces_);
  int index;
  std::vector<IterationTrace> traces;
};

class IterationTimeout : public std::runtime_error {
public:
  IterationTimeout(int index_, std::vector<IterationTrace> traces_);
  int index;
  std::vector<IterationTrace> traces;
};

//! One fact per atom, in the set's canonical order.
std::vector<Atom> facts_of(const AnswerSet& a);

//! The incremental loop: start from the empty model, and per batch solve
//! the encoding joined with facts of the previous model plus the batch.
//! Strictly sequential; every engine call is independent. When the engine
//! reports no grounding stats (external engines), the iteration's stats are
//! recomputed with the in-process grounder; that work is driver overhead
//! and is not added to the engine's time split.
IncrementalResult incremental_solve(const Program& encoding,
                                    const std::vector<FactBatch>& batches,
                                    const SolveEngine& engine,
                                    bool verify_final = false);

} // namespace asptk
