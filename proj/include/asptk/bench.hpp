#pragma once

#include <chrono>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "asptk/incremental.hpp"

namespace asptk {

enum class BenchMode { OneShot, Incremental };
enum class BenchRewrite { Plain, Cag };

struct BenchConfig {
  std::vector<int> sizes; //!< persons per instance, strictly increasing
  int ppi = 5;
  BenchMode mode = BenchMode::Incremental;
  BenchRewrite rewrite = BenchRewrite::Plain;
  std::string engine_cmd; //!< empty runs the in-process engine
  double timeout_seconds = 60.0;
  std::string out_path; //!< CSV target; empty writes no file
  int parallel = 1;
};

//! One CSV row. The three times split the wall clock of the size's whole
//! run: engine grounding, engine search, and everything else (the driver).
//! total_time >= ground_time + solve_time always holds; driver_time is the
//! difference. Resident-set peak is best effort and process-wide.
struct BenchRecord {
  int persons = 0;
  int things = 0;
  int ppi = 0;
  std::string mode;    // "one-shot" | "incremental"
  std::string rewrite; // "plain" | "cag"
  std::string engine;  // "internal" or the external command line
  std::string status;  // "sat" | "unsat" | "timeout" | "error"
  double total_time = 0.0;
  double ground_time = 0.0;
  double solve_time = 0.0;
  double driver_time = 0.0;
  size_t final_ground_rules = 0; //!< last iteration's ground rule count
  size_t final_ground_bytes = 0; //!< last iteration's rendering length
  long max_rss_kb = 0;
};

std::string bench_csv_header();
std::string bench_csv_row(const BenchRecord& r);
//! Parses a row produced by bench_csv_row (not the header).
std::optional<BenchRecord> parse_bench_row(const std::string& line);

class BenchConfigError : public std::runtime_error {
public:
  explicit BenchConfigError(const std::string& what);
};

class ExternalEngineFailure : public std::runtime_error {
public:
  ExternalEngineFailure(int exit_code_, const std::string& stderr_excerpt_);
  int exit_code;
  std::string stderr_excerpt;
};

//! Runs every configured size in increasing order (concurrently when
//! parallel > 1), one record per size. A timeout or engine failure at one
//! size is recorded and the next size still runs. Rows are appended to the
//! CSV as they complete so partial runs stay usable.
std::vector<BenchRecord> run_bench(const BenchConfig& cfg,
                                   std::ostream* log = nullptr);

struct ExternalRun {
  EngineStatus status = EngineStatus::Unsat;
  bool failed = false; //!< spawn failure or unmappable exit
  std::optional<AnswerSet> model;
  double elapsed_seconds = 0.0;
  int exit_code = -1;
  std::string stderr_excerpt;
};

//! Runs `cmd` through /bin/sh with the program text on its standard input.
//! The first standard-output line that parses as an atom list is the model.
//! Exit codes 10 and 30 mean sat, 20 means unsat, as does the word
//! UNSATISFIABLE anywhere in the output; exit 0 with a model line is sat.
//! Anything else is a failure. timeout_seconds < 0 waits forever, 0 is an
//! immediate timeout, otherwise the process group is killed at the
//! deadline.
ExternalRun run_external_engine(const std::string& program_text,
                                const std::string& cmd,
                                double timeout_seconds);

//! Engine adapter over run_external_engine. Throws ExternalEngineFailure on
//! failed runs. Reports no grounding stats and attributes all elapsed time
//! to solving (an external process does not expose the split).
SolveEngine make_external_engine(
    std::string cmd,
    std::optional<std::chrono::steady_clock::time_point> deadline = {});

//! Peak resident set size of this process in kilobytes, 0 when unknown.
long current_max_rss_kb();

} // namespace asptk
