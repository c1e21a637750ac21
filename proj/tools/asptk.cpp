//! Command line front end: grounding, solving, constraint-aware rewriting,
//! the incremental driver, instance generation, solution checking and the
//! benchmark harness, one subcommand each.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "asptk/bench.hpp"
#include "asptk/cag.hpp"
#include "asptk/grounder.hpp"
#include "asptk/hcp.hpp"
#include "asptk/incremental.hpp"
#include "asptk/parser.hpp"
#include "asptk/printer.hpp"
#include "asptk/safety.hpp"
#include "asptk/solver.hpp"

namespace {

using namespace asptk;

// Exit codes shared across subcommands. solve reports satisfiability
// through kExitSat/kExitUnsat; inc adds the per-iteration failure codes.
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitIncUnsat = 2;
constexpr int kExitIncTimeout = 3;

struct CliFailure {
  int code;
};

[[noreturn]] void fail(const std::string& msg, int code = kExitError) {
  std::cerr << "error: " << msg << "\n";
  throw CliFailure{code};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail("cannot write " + path);
}

Program parse_file(const std::string& path) {
  try {
    return parse_program(read_file(path));
  } catch (const ParseError& e) {
    fail(path + ":" + std::to_string(e.line) + ":" +
         std::to_string(e.column) + ": " + e.message);
  }
}

void require_safe(const Program& p, const std::string& path) {
  auto violations = check_safety(p);
  if (violations.empty()) return;
  for (const auto& v : violations)
    std::cerr << path << ": variable " << v.variable << " is unsafe in "
              << v.where << "\n";
  throw CliFailure{kExitError};
}

std::string model_line(const AnswerSet& m) {
  std::string s;
  for (const auto& a : m.atoms) {
    if (!s.empty()) s += ' ';
    s += render_atom(a);
  }
  return s;
}

bool blank(const std::string& text) {
  return text.find_first_not_of(" \t\r\n") == std::string::npos;
}

//! A model file is either one whitespace-separated atom list (the solve
//! output format) or a file of facts. An empty file is the empty model.
std::vector<Atom> read_model_atoms(const std::string& path) {
  auto text = read_file(path);
  if (blank(text)) return {};
  try {
    return parse_atom_list(text);
  } catch (const ParseError&) {
  }
  try {
    auto p = parse_program(text);
    if (p.rules.empty()) return p.facts;
  } catch (const ParseError&) {
  }
  fail(path + ": expected an atom list or a file of facts");
}

std::vector<Atom> read_facts_file(const std::string& path) {
  auto p = parse_file(path);
  if (!p.rules.empty())
    fail(path + ": an instance file must contain only facts");
  return p.facts;
}

//! "45" and "45s" are seconds, "500ms" milliseconds, "2m" minutes.
double parse_duration(const std::string& spec) {
  std::string num = spec;
  double scale = 1.0;
  if (num.size() > 2 && num.compare(num.size() - 2, 2, "ms") == 0) {
    scale = 1e-3;
    num.resize(num.size() - 2);
  } else if (!num.empty() && num.back() == 's') {
    num.pop_back();
  } else if (!num.empty() && num.back() == 'm') {
    scale = 60.0;
    num.pop_back();
  }
  try {
    size_t used = 0;
    double v = std::stod(num, &used);
    if (used == num.size() && v >= 0.0) return v * scale;
  } catch (const std::exception&) {
  }
  fail("bad duration '" + spec + "' (use e.g. 60s, 500ms, 2m)");
}

//! Engine specs are "internal" or "external:<command line>"; the returned
//! string is the command, empty for the in-process engine.
std::string parse_engine_spec(const std::string& spec) {
  if (spec.empty() || spec == "internal") return "";
  const std::string prefix = "external:";
  if (spec.rfind(prefix, 0) == 0 && spec.size() > prefix.size())
    return spec.substr(prefix.size());
  fail("engine must be 'internal' or 'external:<cmd>'");
}

const char* status_text(EngineStatus s) {
  switch (s) {
    case EngineStatus::Sat: return "sat";
    case EngineStatus::Unsat: return "unsat";
    case EngineStatus::Timeout: return "timeout";
  }
  return "?";
}

void print_trace_csv(std::ostream& os, const std::vector<IterationTrace>& ts) {
  os << "iteration,input_facts,ground_rules,ground_bytes,ground_time,"
        "solve_time,model_atoms,status\n";
  for (const auto& t : ts) {
    os << t.index << ',' << t.input_fact_count << ',' << t.stats.rule_count
       << ',' << t.stats.bytes << ',' << std::fixed << std::setprecision(6)
       << t.stats.elapsed_seconds << ',' << t.solve_seconds << ','
       << t.answer_set_size << ',' << status_text(t.status) << "\n";
    os.unsetf(std::ios::fixed);
  }
}

/////////////////////////////////////////////////////////////////////////////
// subcommands

struct GroundArgs {
  std::string file;
  bool oracle = false;
  std::string stats;
};

int cmd_ground(const GroundArgs& a) {
  auto p = parse_file(a.file);
  require_safe(p, a.file);
  auto t0 = std::chrono::steady_clock::now();
  GroundProgram g;
  try {
    g = a.oracle ? herbrand_instantiate(p) : ground(p);
  } catch (const UniverseTooLarge& e) {
    fail(e.what());
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::cout << render_program(g);
  if (!a.stats.empty()) {
    auto s = grounding_stats(g, elapsed);
    if (a.stats == "csv") {
      std::cerr << "rules,constraints,atom_occurrences,bytes,elapsed_seconds\n"
                << s.rule_count << ',' << s.constraint_count << ','
                << s.atom_occurrences << ',' << s.bytes << ',' << std::fixed
                << std::setprecision(6) << s.elapsed_seconds << "\n";
    } else {
      std::cerr << "rules:            " << s.rule_count << "\n"
                << "constraints:      " << s.constraint_count << "\n"
                << "atom occurrences: " << s.atom_occurrences << "\n"
                << "bytes:            " << s.bytes << "\n"
                << "elapsed:          " << std::fixed << std::setprecision(3)
                << s.elapsed_seconds << "s\n";
    }
  }
  return kExitOk;
}

struct SolveArgs {
  std::string file;
  size_t models = 1;
  bool brute = false;
  std::string check;
};

int cmd_solve(const SolveArgs& a) {
  auto p = parse_file(a.file);
  require_safe(p, a.file);
  GroundProgram g;
  try {
    g = ground(p);
  } catch (const UniverseTooLarge& e) {
    fail(e.what());
  }
  if (!a.check.empty()) {
    auto atoms = read_model_atoms(a.check);
    Interpretation i{std::set<Atom>(atoms.begin(), atoms.end())};
    bool stable = check_stable(g, i);
    std::cout << (stable ? "stable\n" : "not stable\n");
    return stable ? kExitSat : kExitUnsat;
  }
  std::vector<AnswerSet> models;
  try {
    if (a.brute) {
      models = enumerate_brute_force(g);
      if (a.models > 0 && models.size() > a.models) models.resize(a.models);
    } else {
      models = solve(g, SolveOptions{.max_models = a.models});
    }
  } catch (const TooManyAtoms& e) {
    fail(e.what());
  }
  for (const auto& m : models) std::cout << model_line(m) << "\n";
  return models.empty() ? kExitUnsat : kExitSat;
}

struct RewriteArgs {
  std::string file;
  size_t unfold_depth = 2;
  std::string only;
  bool report = false;
};

int cmd_rewrite(const RewriteArgs& a) {
  auto p = parse_file(a.file);
  require_safe(p, a.file);
  RewriteOptions opts;
  opts.unfold_depth = a.unfold_depth;
  if (!a.only.empty()) {
    std::set<std::string> preds;
    std::stringstream ss(a.only);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) preds.insert(item);
    opts.target_predicates = std::move(preds);
  }
  RewriteReport rep;
  auto q = cag_rewrite(p, opts, &rep);
  std::cout << render_program(q);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  if (a.report) {
    std::cerr << "rewritten rules: " << rep.entries.size() << "\n";
    for (const auto& e : rep.entries) {
      std::cerr << "  " << (e.base.head ? render_atom(*e.base.head) : "?")
                << ": " << e.applied.size() << " filter(s), "
                << e.skipped.size() << " skipped\n";
      for (const auto& [fc, reason] : e.skipped)
        std::cerr << "    skipped (" << reason
                  << "): " << render_rule(fc.source_constraint) << "\n";
    }
    std::cerr << "derived constraints: " << rep.derived_constraints.size()
              << "\n";
    for (const auto& c : rep.derived_constraints)
      std::cerr << "  " << render_rule(c) << "\n";
  }
  return kExitOk;
}

struct IncArgs {
  std::string encoding;
  std::string instance;
  int ppi = 1;
  std::string engine = "internal";
  bool cag = false;
  std::string trace;
};

//! Below this many instance facts the final model is re-checked for
//! stability against the whole joined program after the loop finishes.
constexpr size_t kVerifyFinalFactLimit = 200;

int cmd_inc(const IncArgs& a) {
  auto enc = parse_file(a.encoding);
  require_safe(enc, a.encoding);
  if (a.cag) enc = cag_rewrite(enc);
  auto facts = read_facts_file(a.instance);
  auto batches = hcp::batch_facts(facts, a.ppi);
  auto cmd = parse_engine_spec(a.engine);
  SolveEngine engine =
      cmd.empty() ? make_internal_engine() : make_external_engine(cmd);
  bool verify_final = facts.size() <= kVerifyFinalFactLimit;
  try {
    auto res = incremental_solve(enc, batches, engine, verify_final);
    if (a.trace == "csv") print_trace_csv(std::cerr, res.traces);
    std::cout << model_line(res.final_model) << "\n";
    if (res.final_verified) {
      if (!*res.final_verified)
        fail("final model is not stable on the joined program");
      std::cerr << "final model verified against the full instance\n";
    }
    return kExitOk;
  } catch (const IterationUnsat& e) {
    if (a.trace == "csv") print_trace_csv(std::cerr, e.traces);
    std::cerr << "iteration " << e.index << ": unsatisfiable\n";
    return kExitIncUnsat;
  } catch (const IterationTimeout& e) {
    if (a.trace == "csv") print_trace_csv(std::cerr, e.traces);
    std::cerr << "iteration " << e.index << ": timeout\n";
    return kExitIncTimeout;
  } catch (const ExternalEngineFailure& e) {
    fail(std::string("external engine failed: ") + e.what());
  }
}

struct GenArgs {
  int persons = 1;
  int ppi = 5;
  std::string emit_dir;
};

int cmd_gen(const GenArgs& a) {
  hcp::InstanceSpec spec;
  spec.persons = a.persons;
  auto inst = hcp::gen_instance(spec);
  if (a.emit_dir.empty()) {
    std::cout << hcp::render_facts(inst);
    return kExitOk;
  }
  auto batches = hcp::batch_facts(inst, a.ppi);
  std::error_code ec;
  std::filesystem::create_directories(a.emit_dir, ec);
  if (ec) fail("cannot create " + a.emit_dir + ": " + ec.message());
  for (const auto& b : batches) {
    char name[32];
    std::snprintf(name, sizeof name, "batch_%03d.lp", b.index);
    write_file((std::filesystem::path(a.emit_dir) / name).string(),
               hcp::render_facts(b.facts));
  }
  std::cerr << "wrote " << batches.size() << " batch file(s) to " << a.emit_dir
            << "\n";
  return kExitOk;
}

struct VerifyArgs {
  std::string instance;
  std::string model;
};

int cmd_verify(const VerifyArgs& a) {
  auto inst = parse_file(a.instance); // facts, optionally with the encoding
  auto atoms = read_model_atoms(a.model);
  AnswerSet cand{std::set<Atom>(atoms.begin(), atoms.end())};
  auto violations = hcp::verify_solution(inst.facts, cand);
  for (const auto& v : violations) std::cout << v << "\n";
  if (violations.empty()) {
    std::cout << "valid\n";
    return kExitOk;
  }
  return kExitError;
}

struct BenchArgs {
  std::vector<int> sizes;
  std::string mode = "incremental";
  std::string rewrite = "plain";
  int ppi = 5;
  std::string timeout = "60s";
  std::string out;
  std::string engine = "internal";
  int parallel = 1;
};

int cmd_bench(const BenchArgs& a) {
  BenchConfig cfg;
  cfg.sizes = a.sizes;
  cfg.ppi = a.ppi;
  cfg.mode =
      a.mode == "one-shot" || a.mode == "oneshot" ? BenchMode::OneShot
                                                  : BenchMode::Incremental;
  cfg.rewrite = a.rewrite == "cag" ? BenchRewrite::Cag : BenchRewrite::Plain;
  cfg.engine_cmd = parse_engine_spec(a.engine);
  cfg.timeout_seconds = parse_duration(a.timeout);
  cfg.out_path = a.out;
  cfg.parallel = a.parallel;
  try {
    auto records = run_bench(cfg, &std::cerr);
    std::cerr << "wrote " << records.size() << " row(s) to " << cfg.out_path
              << "\n";
    return kExitOk;
  } catch (const BenchConfigError& e) {
    fail(e.what());
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"answer set grounding, solving and rewriting workbench"};
  app.require_subcommand(1);

  GroundArgs ga;
  auto* ground_cmd =
      app.add_subcommand("ground", "instantiate a program and print it");
  ground_cmd->add_option("file", ga.file, "program file")->required();
  ground_cmd->add_flag("--oracle", ga.oracle,
                       "use the brute-force reference instantiator");
  ground_cmd
      ->add_option("--stats", ga.stats, "print grounding stats to stderr")
      ->check(CLI::IsMember({"csv", "human"}));

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand(
      "solve", "enumerate stable models (exit 10 sat, 20 unsat)");
  solve_cmd->add_option("file", sa.file, "program file")->required();
  solve_cmd->add_option("--models", sa.models,
                        "stop after N models, 0 enumerates all");
  solve_cmd->add_flag("--brute-force", sa.brute,
                      "check every interpretation instead of searching");
  solve_cmd->add_option(
      "--check", sa.check,
      "verify that the model in this file is stable instead of solving");

  RewriteArgs ra;
  auto* rewrite_cmd = app.add_subcommand(
      "rewrite", "add constraint-derived filters to guess rules");
  rewrite_cmd->add_option("file", ra.file, "program file")->required();
  rewrite_cmd->add_option("--unfold-depth", ra.unfold_depth,
                          "constraint unfolding depth");
  rewrite_cmd->add_option("--only", ra.only,
                          "comma-separated head predicates to rewrite");
  rewrite_cmd->add_flag("--report", ra.report,
                        "print the per-rule rewrite report to stderr");

  IncArgs ia;
  auto* inc_cmd = app.add_subcommand(
      "inc",
      "solve an instance in per-batch iterations (exit 2 unsat, 3 timeout)");
  inc_cmd->add_option("encoding", ia.encoding, "encoding file")->required();
  inc_cmd->add_option("--instance", ia.instance, "instance facts file")
      ->required();
  inc_cmd->add_option("--ppi", ia.ppi, "persons per iteration")->required();
  inc_cmd->add_option("--engine", ia.engine,
                      "'internal' or 'external:<cmd>' reading a program on "
                      "stdin");
  inc_cmd->add_flag("--cag", ia.cag,
                    "apply the constraint-aware rewriting to the encoding");
  inc_cmd->add_option("--trace", ia.trace, "per-iteration trace to stderr")
      ->check(CLI::IsMember({"csv"}));

  GenArgs na;
  auto* gen_cmd =
      app.add_subcommand("gen", "generate a household instance");
  gen_cmd->add_option("--persons", na.persons, "number of persons")
      ->required()
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--ppi", na.ppi, "persons per batch when emitting");
  gen_cmd->add_option("--emit-batches", na.emit_dir,
                      "write batch_NNN.lp files into this directory");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand(
      "verify", "check a configuration against an instance (exit 0 valid)");
  verify_cmd->add_option("instance", va.instance, "instance facts file")
      ->required();
  verify_cmd->add_option("model", va.model, "model or configuration file")
      ->required();

  BenchArgs ba;
  auto* bench_cmd =
      app.add_subcommand("bench", "run scaling measurements to a CSV");
  bench_cmd->add_option("--sizes", ba.sizes, "person counts, e.g. 1,2,3")
      ->delimiter(',')
      ->required();
  bench_cmd->add_option("--mode", ba.mode, "one-shot or incremental")
      ->check(CLI::IsMember({"one-shot", "oneshot", "incremental"}));
  bench_cmd->add_option("--rewrite", ba.rewrite, "plain or cag")
      ->check(CLI::IsMember({"plain", "cag"}));
  bench_cmd->add_option("--ppi", ba.ppi, "persons per iteration");
  bench_cmd->add_option("--timeout", ba.timeout, "per-size budget, e.g. 60s");
  bench_cmd->add_option("--out", ba.out, "CSV output path")->required();
  bench_cmd->add_option("--engine", ba.engine,
                        "'internal' or 'external:<cmd>'");
  bench_cmd->add_option("--parallel", ba.parallel, "sizes run concurrently")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }

  try {
    if (*ground_cmd) return cmd_ground(ga);
    if (*solve_cmd) return cmd_solve(sa);
    if (*rewrite_cmd) return cmd_rewrite(ra);
    if (*inc_cmd) return cmd_inc(ia);
    if (*gen_cmd) return cmd_gen(na);
    if (*verify_cmd) return cmd_verify(va);
    if (*bench_cmd) return cmd_bench(ba);
  } catch (const CliFailure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
