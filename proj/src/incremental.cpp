#include "asptk/incremental.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <string>

namespace asptk {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

} // namespace

IterationUnsat::IterationUnsat(int index_, std::vector<IterationTrace> traces_)
    : std::runtime_error("no answer set at iteration " + std::to_string(index_)),
      index(index_), traces(std::move(traces_)) {}

IterationTimeout::IterationTimeout(int index_, std::vector<IterationTrace> traces_)
    : std::runtime_error("engine timeout at iteration " + std::to_string(index_)),
      index(index_), traces(std::move(traces_)) {}

SolveEngine make_internal_engine(GroundOptions gopts,
                                 std::optional<Clock::time_point> deadline) {
  return [gopts, deadline](const Program& p) {
    EngineResult res;
    if (deadline && Clock::now() >= *deadline) {
      res.status = EngineStatus::Timeout;
      return res;
    }
    auto t0 = Clock::now();
    GroundProgram g = ground(p, gopts);
    res.ground_seconds = seconds_since(t0);
    res.stats = grounding_stats(g, res.ground_seconds);

    SolveOptions sopts;
    sopts.max_models = 1;
    if (deadline) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          *deadline - Clock::now());
      if (left.count() <= 0) {
        res.status = EngineStatus::Timeout;
        return res;
      }
      sopts.timeout = left;
    }
    auto t1 = Clock::now();
    try {
      auto models = solve(g, sopts);
      res.solve_seconds = seconds_since(t1);
      if (models.empty()) {
        res.status = EngineStatus::Unsat;
      } else {
        res.status = EngineStatus::Sat;
        res.model = std::move(models.front());
      }
    } catch (const SolveTimeout&) {
      res.solve_seconds = seconds_since(t1);
      res.status = EngineStatus::Timeout;
    }
    return res;
  };
}

std::vector<Atom> facts_of(const AnswerSet& a) {
  return {a.atoms.begin(), a.atoms.end()};
}

IncrementalResult incremental_solve(const Program& encoding,
                                    const std::vector<FactBatch>& batches,
                                    const SolveEngine& engine,
                                    bool verify_final) {
  IncrementalResult out;
  AnswerSet delta;

  for (size_t bi = 0; bi < batches.size(); ++bi) {
    // InputFacts = facts of the previous model merged with this batch.
    std::set<Atom> input(delta.atoms);
    input.insert(batches[bi].facts.begin(), batches[bi].facts.end());

    Program p = encoding;
    p.facts.insert(p.facts.end(), input.begin(), input.end());

    EngineResult res = engine(p);

    IterationTrace trace;
    trace.index = batches[bi].index != 0 ? batches[bi].index
                                         : static_cast<int>(bi) + 1;
    trace.input_fact_count = input.size();
    trace.solve_seconds = res.solve_seconds;
    trace.status = res.status;
    trace.answer_set_size = res.model.atoms.size();
    if (res.stats) {
      trace.stats = *res.stats;
    } else if (res.status != EngineStatus::Timeout) {
      // The engine could not describe its grounding; reproduce it here so
      // the trace stays comparable. Driver work, not engine time.
      trace.stats = grounding_stats(ground(p));
    }
    out.traces.push_back(trace);

    if (res.status == EngineStatus::Unsat)
      throw IterationUnsat(trace.index, out.traces);
    if (res.status == EngineStatus::Timeout)
      throw IterationTimeout(trace.index, out.traces);
    delta = std::move(res.model);
  }

  out.final_model = std::move(delta);

  if (verify_final) {
    std::set<Atom> all;
    for (const auto& b : batches) all.insert(b.facts.begin(), b.facts.end());
    Program full = encoding;
    full.facts.insert(full.facts.end(), all.begin(), all.end());
    GroundProgram g = ground(full);
    out.final_verified =
        check_stable(g, Interpretation{out.final_model.atoms});
  }
  return out;
}

} // namespace asptk
