#include "doctest.h"

#include <chrono>
#include <cstdio>
#include <filesystem>

#include "asptk/bench.hpp"
#include "asptk/hcp.hpp"
#include "testutil.hpp"

using namespace asptk;
using namespace testutil;

namespace {

Atom sym(const char* pred) { return Atom{pred, {}}; }

std::string temp_csv(const char* stem) {
  auto p = std::filesystem::temp_directory_path() / stem;
  return p.string();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

} // namespace

TEST_CASE("the CSV header is frozen") {
  CHECK(bench_csv_header() ==
        "persons,things,ppi,mode,rewrite,engine,status,total_time,"
        "ground_time,solve_time,driver_time,final_iteration_ground_rules,"
        "final_iteration_ground_bytes,max_rss_kb");
}

TEST_CASE("records round trip through the CSV row format") {
  BenchRecord r;
  r.persons = 7;
  r.things = 70;
  r.ppi = 2;
  r.mode = "incremental";
  r.rewrite = "cag";
  r.engine = "awk 'BEGIN { print \"a,b\" }'"; // quoting-hostile command line
  r.status = "sat";
  r.total_time = 2.5;
  r.ground_time = 0.25;
  r.solve_time = 1.125;
  r.driver_time = 1.125;
  r.final_ground_rules = 440;
  r.final_ground_bytes = 12345;
  r.max_rss_kb = 65536;

  auto line = bench_csv_row(r);
  CHECK(line.find('\n') == std::string::npos);
  auto back = parse_bench_row(line);
  REQUIRE(back.has_value());
  CHECK(back->persons == r.persons);
  CHECK(back->things == r.things);
  CHECK(back->ppi == r.ppi);
  CHECK(back->mode == r.mode);
  CHECK(back->rewrite == r.rewrite);
  CHECK(back->engine == r.engine);
  CHECK(back->status == r.status);
  CHECK(back->total_time == doctest::Approx(r.total_time));
  CHECK(back->ground_time == doctest::Approx(r.ground_time));
  CHECK(back->solve_time == doctest::Approx(r.solve_time));
  CHECK(back->driver_time == doctest::Approx(r.driver_time));
  CHECK(back->final_ground_rules == r.final_ground_rules);
  CHECK(back->final_ground_bytes == r.final_ground_bytes);
  CHECK(back->max_rss_kb == r.max_rss_kb);
}

TEST_CASE("parse_bench_row rejects lines bench_csv_row never produced") {
  CHECK_FALSE(parse_bench_row(bench_csv_header()).has_value());
  CHECK_FALSE(parse_bench_row("").has_value());
  CHECK_FALSE(parse_bench_row("garbage").has_value());
  CHECK_FALSE(parse_bench_row("1,2,3").has_value());
  // thirteen fields: one short
  CHECK_FALSE(
      parse_bench_row("1,10,5,incremental,plain,internal,sat,1,1,1,1,1,1")
          .has_value());
}

TEST_CASE("the external runner implements the engine exit protocol") {
  SUBCASE("exit 10 with a model line is sat") {
    auto r = run_external_engine("", "printf 'a b(1)\\n'; exit 10", 10.0);
    CHECK_FALSE(r.failed);
    CHECK(r.status == EngineStatus::Sat);
    CHECK(r.exit_code == 10);
    REQUIRE(r.model.has_value());
    CHECK(r.model->atoms.count(sym("a")) == 1);
    CHECK(r.model->atoms.size() == 2);
  }
  SUBCASE("exit 30 is sat, and banner lines are skipped") {
    auto r = run_external_engine(
        "", "printf 'Answer: 1\\nsel(2)\\n'; exit 30", 10.0);
    CHECK(r.status == EngineStatus::Sat);
    REQUIRE(r.model.has_value());
    CHECK(r.model->atoms.size() == 1);
  }
  SUBCASE("exit 20 is unsat") {
    auto r = run_external_engine("", "exit 20", 10.0);
    CHECK_FALSE(r.failed);
    CHECK(r.status == EngineStatus::Unsat);
  }
  SUBCASE("the word UNSATISFIABLE is unsat even at exit 0") {
    auto r = run_external_engine("", "echo UNSATISFIABLE", 10.0);
    CHECK_FALSE(r.failed);
    CHECK(r.status == EngineStatus::Unsat);
  }
  SUBCASE("exit 0 with a parseable model line is sat") {
    auto r = run_external_engine("", "printf 'p(1) p(2)\\n'", 10.0);
    CHECK_FALSE(r.failed);
    CHECK(r.status == EngineStatus::Sat);
    REQUIRE(r.model.has_value());
    CHECK(r.model->atoms.size() == 2);
  }
  SUBCASE("exit 0 without a model is a failure, not unsat") {
    auto r = run_external_engine("", "echo '//not//a//model'", 10.0);
    CHECK(r.failed);
  }
  SUBCASE("a nonzero exit carries the stderr excerpt") {
    auto r = run_external_engine("", "echo boom 1>&2; exit 7", 10.0);
    CHECK(r.failed);
    CHECK(r.exit_code == 7);
    CHECK(r.stderr_excerpt.find("boom") != std::string::npos);
  }
  SUBCASE("the program text arrives on standard input") {
    auto r = run_external_engine(
        "needle(42).\n",
        "grep -q 'needle(42)' && { echo ok; exit 10; } || exit 20", 10.0);
    CHECK(r.status == EngineStatus::Sat);
    REQUIRE(r.model.has_value());
    CHECK(r.model->atoms.count(sym("ok")) == 1);
  }
  SUBCASE("the deadline kills the process group") {
    auto r = run_external_engine("", "sleep 30", 0.3);
    CHECK(r.status == EngineStatus::Timeout);
    CHECK_FALSE(r.failed);
    CHECK(r.elapsed_seconds >= 0.25);
    CHECK(r.elapsed_seconds < 5.0);
  }
  SUBCASE("a zero budget times out without spawning") {
    auto r = run_external_engine("", "echo never; exit 10", 0.0);
    CHECK(r.status == EngineStatus::Timeout);
    CHECK(r.elapsed_seconds == 0.0);
  }
  SUBCASE("a negative budget waits for completion") {
    auto r = run_external_engine("", "sleep 0.1; printf 'a\\n'; exit 10",
                                 -1.0);
    CHECK(r.status == EngineStatus::Sat);
  }
}

TEST_CASE("the engine adapter raises failures and respects its deadline") {
  Program empty;

  auto ok = make_external_engine("printf 'a\\n'; exit 10");
  auto res = ok(empty);
  CHECK(res.status == EngineStatus::Sat);
  CHECK(res.model.atoms.count(sym("a")) == 1);
  CHECK_FALSE(res.stats.has_value()); // externals expose no grounding
  CHECK(res.ground_seconds == 0.0);
  CHECK(res.solve_seconds > 0.0);

  auto bad = make_external_engine("echo fail 1>&2; exit 7");
  try {
    bad(empty);
    FAIL("expected ExternalEngineFailure");
  } catch (const ExternalEngineFailure& e) {
    CHECK(e.exit_code == 7);
    CHECK(e.stderr_excerpt.find("fail") != std::string::npos);
  }

  auto expired = make_external_engine(
      "printf 'a\\n'; exit 10",
      std::chrono::steady_clock::now() - std::chrono::seconds(1));
  CHECK(expired(empty).status == EngineStatus::Timeout);
}

TEST_CASE("a small internal benchmark produces coherent rows") {
  BenchConfig cfg;
  cfg.sizes = {1, 2};
  cfg.ppi = 5;
  cfg.mode = BenchMode::Incremental;
  cfg.rewrite = BenchRewrite::Plain;
  cfg.timeout_seconds = 60.0;
  cfg.out_path = temp_csv("asptk_bench_unit.csv");

  std::ostringstream log;
  auto records = run_bench(cfg, &log);
  REQUIRE(records.size() == 2);
  for (size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    CHECK(r.persons == cfg.sizes[i]);
    CHECK(r.things == 10 * r.persons);
    CHECK(r.ppi == 5);
    CHECK(r.mode == "incremental");
    CHECK(r.rewrite == "plain");
    CHECK(r.engine == "internal");
    CHECK(r.status == "sat");
    CHECK(r.total_time >= r.ground_time + r.solve_time - 1e-9);
    CHECK(r.driver_time ==
          doctest::Approx(r.total_time - r.ground_time - r.solve_time));
    CHECK(r.final_ground_rules > 0);
    CHECK(r.final_ground_bytes > 0);
    CHECK(r.max_rss_kb > 0);
  }
  CHECK(records[0].final_ground_rules < records[1].final_ground_rules);
  CHECK(log.str().find("size 1: sat") != std::string::npos);

  auto lines = read_lines(cfg.out_path);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == bench_csv_header());
  for (size_t i = 1; i < lines.size(); ++i) {
    auto row = parse_bench_row(lines[i]);
    REQUIRE(row.has_value());
    CHECK(row->persons == records[i - 1].persons);
    CHECK(row->status == records[i - 1].status);
    CHECK(row->final_ground_rules == records[i - 1].final_ground_rules);
  }
  std::remove(cfg.out_path.c_str());
}

TEST_CASE("one-shot mode is labeled and grounded once") {
  BenchConfig cfg;
  cfg.sizes = {1};
  cfg.mode = BenchMode::OneShot;
  cfg.rewrite = BenchRewrite::Cag;
  auto records = run_bench(cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].mode == "one-shot");
  CHECK(records[0].rewrite == "cag");
  CHECK(records[0].status == "sat");
  CHECK(records[0].final_ground_rules > 0);
}

TEST_CASE("a zero timeout is recorded, not fatal") {
  BenchConfig cfg;
  cfg.sizes = {1, 2};
  cfg.timeout_seconds = 0.0;
  auto records = run_bench(cfg);
  REQUIRE(records.size() == 2);
  for (const auto& r : records) CHECK(r.status == "timeout");
}

TEST_CASE("configuration mistakes are rejected before any work runs") {
  auto run = [](BenchConfig cfg) { run_bench(cfg); };
  BenchConfig base;
  base.sizes = {1};

  BenchConfig c1 = base;
  c1.sizes = {};
  CHECK_THROWS_AS(run(c1), BenchConfigError);

  BenchConfig c2 = base;
  c2.sizes = {0};
  CHECK_THROWS_AS(run(c2), BenchConfigError);

  BenchConfig c3 = base;
  c3.sizes = {2, 2};
  CHECK_THROWS_AS(run(c3), BenchConfigError);

  BenchConfig c4 = base;
  c4.sizes = {3, 1};
  CHECK_THROWS_AS(run(c4), BenchConfigError);

  BenchConfig c5 = base;
  c5.ppi = 0;
  CHECK_THROWS_AS(run(c5), BenchConfigError);

  BenchConfig c6 = base;
  c6.parallel = 0;
  CHECK_THROWS_AS(run(c6), BenchConfigError);

  BenchConfig c7 = base;
  c7.out_path = "/nonexistent_dir_zz/out.csv";
  CHECK_THROWS_AS(run(c7), BenchConfigError);
}

TEST_CASE("parallel runs keep records in size order") {
  BenchConfig cfg;
  cfg.sizes = {1, 2, 3};
  cfg.ppi = 1;
  cfg.rewrite = BenchRewrite::Cag;
  cfg.parallel = 2;
  auto records = run_bench(cfg);
  REQUIRE(records.size() == 3);
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].persons == cfg.sizes[i]);
    CHECK(records[i].status == "sat");
  }
}

TEST_CASE("an external engine flows through the same pipeline") {
  // A constant-unsat engine: the driver still recomputes the grounding so
  // the size column stays comparable across engines.
  BenchConfig cfg;
  cfg.sizes = {1};
  cfg.engine_cmd = "exit 20";
  cfg.mode = BenchMode::Incremental;
  std::ostringstream log;
  auto records = run_bench(cfg, &log);
  REQUIRE(records.size() == 1);
  CHECK(records[0].engine == "exit 20");
  CHECK(records[0].status == "unsat");
  CHECK(records[0].final_ground_rules > 0);

  cfg.mode = BenchMode::OneShot;
  records = run_bench(cfg, &log);
  REQUIRE(records.size() == 1);
  CHECK(records[0].status == "unsat");
  CHECK(records[0].final_ground_rules > 0);

  cfg.engine_cmd = "echo kaput 1>&2; exit 7";
  records = run_bench(cfg, &log);
  REQUIRE(records.size() == 1);
  CHECK(records[0].status == "error");
  CHECK(log.str().find("kaput") != std::string::npos);
}
