#include "asptk/bench.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "asptk/hcp.hpp"
#include "asptk/parser.hpp"
#include "asptk/printer.hpp"

namespace asptk {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

} // namespace

BenchConfigError::BenchConfigError(const std::string& what)
    : std::runtime_error(what) {}

ExternalEngineFailure::ExternalEngineFailure(int exit_code_,
                                             const std::string& stderr_excerpt_)
    : std::runtime_error("external engine failed with exit code " +
                         std::to_string(exit_code_)),
      exit_code(exit_code_), stderr_excerpt(stderr_excerpt_) {}

/////////////////////////////////////////////////////////////////////////////
// external engine plumbing
/////////////////////////////////////////////////////////////////////////////

namespace {

//! First standard-output line that reads as a nonempty atom list.
std::optional<AnswerSet> first_model_line(const std::string& text) {
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto atoms = parse_atom_list(line);
      if (!atoms.empty())
        return AnswerSet{std::set<Atom>(atoms.begin(), atoms.end())};
    } catch (...) {
      // not a model line; keep scanning
    }
  }
  return {};
}

void close_fd(int& fd) {
  if (fd >= 0) close(fd);
  fd = -1;
}

} // namespace

ExternalRun run_external_engine(const std::string& program_text,
                                const std::string& cmd,
                                double timeout_seconds) {
  ExternalRun run;
  if (timeout_seconds == 0.0) {
    run.status = EngineStatus::Timeout;
    return run;
  }

  // A child that exits before reading its input must not bring us down.
  static const bool sigpipe_ignored = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;

  int in[2] = {-1, -1}, out[2] = {-1, -1}, err[2] = {-1, -1};
  if (pipe(in) != 0 || pipe(out) != 0 || pipe(err) != 0) {
    for (int* p : {in, out, err}) {
      close_fd(p[0]);
      close_fd(p[1]);
    }
    run.failed = true;
    run.stderr_excerpt = "pipe failed";
    return run;
  }

  auto t0 = Clock::now();
  std::optional<Clock::time_point> deadline;
  if (timeout_seconds > 0.0)
    deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                        std::chrono::duration<double>(timeout_seconds));

  pid_t pid = fork();
  if (pid < 0) {
    for (int* p : {in, out, err}) {
      close_fd(p[0]);
      close_fd(p[1]);
    }
    run.failed = true;
    run.stderr_excerpt = "fork failed";
    return run;
  }
  if (pid == 0) {
    setpgid(0, 0); // own group, so the whole shell pipeline can be killed
    dup2(in[0], 0);
    dup2(out[1], 1);
    dup2(err[1], 2);
    for (int* p : {in, out, err}) {
      close(p[0]);
      close(p[1]);
    }
    execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  close_fd(in[0]);
  close_fd(out[1]);
  close_fd(err[1]);
  fcntl(in[1], F_SETFL, O_NONBLOCK);

  std::string out_text, err_text;
  size_t written = 0;
  bool killed = false;

  while (out[0] >= 0 || err[0] >= 0 || in[1] >= 0) {
    struct pollfd fds[3];
    int n = 0, in_idx = -1, out_idx = -1, err_idx = -1;
    if (in[1] >= 0) {
      fds[n] = {in[1], POLLOUT, 0};
      in_idx = n++;
    }
    if (out[0] >= 0) {
      fds[n] = {out[0], POLLIN, 0};
      out_idx = n++;
    }
    if (err[0] >= 0) {
      fds[n] = {err[0], POLLIN, 0};
      err_idx = n++;
    }

    int wait_ms = 200;
    if (deadline) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                      *deadline - Clock::now())
                      .count();
      if (left <= 0) {
        kill(-pid, SIGKILL);
        killed = true;
        break;
      }
      wait_ms = static_cast<int>(std::min<long long>(left, 200));
    }

    int rc = poll(fds, static_cast<nfds_t>(n), wait_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }

    if (in_idx >= 0 && fds[in_idx].revents != 0) {
      if (fds[in_idx].revents & POLLOUT) {
        size_t chunk = std::min<size_t>(65536, program_text.size() - written);
        ssize_t w = write(in[1], program_text.data() + written, chunk);
        if (w > 0) written += static_cast<size_t>(w);
        else if (w < 0 && errno != EAGAIN && errno != EINTR) close_fd(in[1]);
      } else {
        close_fd(in[1]); // POLLERR/POLLHUP: reader is gone
      }
      if (in[1] >= 0 && written == program_text.size()) close_fd(in[1]);
    }

    char buf[65536];
    if (out_idx >= 0 && fds[out_idx].revents != 0) {
      ssize_t r = read(out[0], buf, sizeof buf);
      if (r > 0) out_text.append(buf, static_cast<size_t>(r));
      else close_fd(out[0]);
    }
    if (err_idx >= 0 && fds[err_idx].revents != 0) {
      ssize_t r = read(err[0], buf, sizeof buf);
      if (r > 0) err_text.append(buf, static_cast<size_t>(r));
      else close_fd(err[0]);
    }
  }
  close_fd(in[1]);
  close_fd(out[0]);
  close_fd(err[0]);

  int st = 0;
  if (killed) {
    waitpid(pid, &st, 0);
  } else {
    for (;;) {
      pid_t r = waitpid(pid, &st, WNOHANG);
      if (r != 0) break;
      if (deadline && Clock::now() >= *deadline) {
        kill(-pid, SIGKILL);
        killed = true;
        waitpid(pid, &st, 0);
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }

  run.elapsed_seconds = seconds_since(t0);
  run.exit_code = WIFEXITED(st)    ? WEXITSTATUS(st)
                  : WIFSIGNALED(st) ? 128 + WTERMSIG(st)
                                    : -1;
  run.stderr_excerpt = err_text.substr(0, 300);

  if (killed) {
    run.status = EngineStatus::Timeout;
    return run;
  }

  auto model = first_model_line(out_text);
  bool says_unsat = out_text.find("UNSATISFIABLE") != std::string::npos;
  if (run.exit_code == 10 || run.exit_code == 30) {
    run.status = EngineStatus::Sat;
    run.model = model ? *model : AnswerSet{};
  } else if (run.exit_code == 20 || says_unsat) {
    run.status = EngineStatus::Unsat;
  } else if (run.exit_code == 0 && model) {
    run.status = EngineStatus::Sat;
    run.model = model;
  } else {
    run.failed = true;
  }
  return run;
}

SolveEngine make_external_engine(std::string cmd,
                                 std::optional<Clock::time_point> deadline) {
  return [cmd = std::move(cmd), deadline](const Program& p) {
    double budget = -1.0;
    if (deadline)
      budget = std::max(
          0.0, std::chrono::duration<double>(*deadline - Clock::now()).count());
    ExternalRun r = run_external_engine(render_program(p), cmd, budget);
    if (r.failed) throw ExternalEngineFailure(r.exit_code, r.stderr_excerpt);
    EngineResult res;
    res.status = r.status;
    if (r.model) res.model = std::move(*r.model);
    res.solve_seconds = r.elapsed_seconds; // no ground/solve split available
    return res;
  };
}

/////////////////////////////////////////////////////////////////////////////
// CSV
/////////////////////////////////////////////////////////////////////////////

std::string bench_csv_header() {
  return "persons,things,ppi,mode,rewrite,engine,status,total_time,"
         "ground_time,solve_time,driver_time,final_iteration_ground_rules,"
         "final_iteration_ground_bytes,max_rss_kb";
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

} // namespace

std::string bench_csv_row(const BenchRecord& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  out << r.persons << ',' << r.things << ',' << r.ppi << ',' << r.mode << ','
      << r.rewrite << ',' << csv_quote(r.engine) << ',' << r.status << ','
      << r.total_time << ',' << r.ground_time << ',' << r.solve_time << ','
      << r.driver_time << ',' << r.final_ground_rules << ','
      << r.final_ground_bytes << ',' << r.max_rss_kb;
  return out.str();
}

std::optional<BenchRecord> parse_bench_row(const std::string& line) {
  auto f = split_csv(line);
  if (f.size() != 14) return {};
  try {
    BenchRecord r;
    r.persons = std::stoi(f[0]);
    r.things = std::stoi(f[1]);
    r.ppi = std::stoi(f[2]);
    r.mode = f[3];
    r.rewrite = f[4];
    r.engine = f[5];
    r.status = f[6];
    r.total_time = std::stod(f[7]);
    r.ground_time = std::stod(f[8]);
    r.solve_time = std::stod(f[9]);
    r.driver_time = std::stod(f[10]);
    r.final_ground_rules = std::stoul(f[11]);
    r.final_ground_bytes = std::stoul(f[12]);
    r.max_rss_kb = std::stol(f[13]);
    return r;
  } catch (...) {
    return {};
  }
}

long current_max_rss_kb() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream in(line.substr(6));
      long kb = 0;
      in >> kb;
      return kb;
    }
  }
  rusage ru{};
  if (getrusage(RUSAGE_SELF, &ru) == 0) return ru.ru_maxrss;
  return 0;
}

/////////////////////////////////////////////////////////////////////////////
// the harness
/////////////////////////////////////////////////////////////////////////////

namespace {

void fill_from_traces(BenchRecord& rec, const std::vector<IterationTrace>& traces) {
  for (const auto& tr : traces) {
    rec.ground_time += tr.stats.elapsed_seconds;
    rec.solve_time += tr.solve_seconds;
  }
  for (auto it = traces.rbegin(); it != traces.rend(); ++it) {
    if (it->stats.rule_count != 0 || it->stats.bytes != 0) {
      rec.final_ground_rules = it->stats.rule_count;
      rec.final_ground_bytes = it->stats.bytes;
      break;
    }
  }
}

const char* status_text(EngineStatus s) {
  switch (s) {
  case EngineStatus::Sat: return "sat";
  case EngineStatus::Unsat: return "unsat";
  case EngineStatus::Timeout: return "timeout";
  }
  return "error";
}

} // namespace

std::vector<BenchRecord> run_bench(const BenchConfig& cfg, std::ostream* log) {
  if (cfg.sizes.empty()) throw BenchConfigError("no instance sizes given");
  for (int s : cfg.sizes)
    if (s < 1) throw BenchConfigError("instance sizes must be >= 1");
  for (size_t i = 0; i + 1 < cfg.sizes.size(); ++i)
    if (cfg.sizes[i] >= cfg.sizes[i + 1])
      throw BenchConfigError("instance sizes must be strictly increasing");
  if (cfg.ppi < 1) throw BenchConfigError("ppi must be >= 1");
  if (cfg.parallel < 1) throw BenchConfigError("parallel must be >= 1");

  std::ofstream csv;
  if (!cfg.out_path.empty()) {
    csv.open(cfg.out_path);
    if (!csv) throw BenchConfigError("cannot write " + cfg.out_path);
    csv << bench_csv_header() << '\n' << std::flush;
  }

  const Program& enc =
      cfg.rewrite == BenchRewrite::Cag ? hcp::cag_encoding() : hcp::encoding();
  std::vector<BenchRecord> records(cfg.sizes.size());
  std::mutex io;

  auto run_one = [&](size_t idx) {
    int persons = cfg.sizes[idx];
    BenchRecord rec;
    rec.persons = persons;
    rec.ppi = cfg.ppi;
    rec.mode = cfg.mode == BenchMode::OneShot ? "one-shot" : "incremental";
    rec.rewrite = cfg.rewrite == BenchRewrite::Cag ? "cag" : "plain";
    rec.engine = cfg.engine_cmd.empty() ? "internal" : cfg.engine_cmd;

    hcp::InstanceSpec spec;
    spec.persons = persons;
    auto instance = hcp::gen_instance(spec);
    rec.things = static_cast<int>(
        std::count_if(instance.begin(), instance.end(),
                      [](const Atom& a) { return a.predicate == "thing"; }));

    auto t0 = Clock::now();
    auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                             std::chrono::duration<double>(
                                 std::max(0.0, cfg.timeout_seconds)));
    SolveEngine engine = cfg.engine_cmd.empty()
                             ? make_internal_engine({}, deadline)
                             : make_external_engine(cfg.engine_cmd, deadline);

    try {
      if (cfg.mode == BenchMode::Incremental) {
        auto batches = hcp::batch_facts(instance, cfg.ppi);
        try {
          auto res = incremental_solve(enc, batches, engine, false);
          rec.status = "sat";
          fill_from_traces(rec, res.traces);
        } catch (const IterationUnsat& e) {
          rec.status = "unsat";
          fill_from_traces(rec, e.traces);
        } catch (const IterationTimeout& e) {
          rec.status = "timeout";
          fill_from_traces(rec, e.traces);
        }
      } else {
        Program full = enc;
        full.facts.insert(full.facts.end(), instance.begin(), instance.end());
        EngineResult res = engine(full);
        rec.status = status_text(res.status);
        rec.ground_time = res.ground_seconds;
        rec.solve_time = res.solve_seconds;
        if (!res.stats && res.status != EngineStatus::Timeout)
          res.stats = grounding_stats(ground(full));
        if (res.stats) {
          rec.final_ground_rules = res.stats->rule_count;
          rec.final_ground_bytes = res.stats->bytes;
        }
      }
    } catch (const ExternalEngineFailure& e) {
      rec.status = "error";
      std::lock_guard<std::mutex> lk(io);
      if (log)
        *log << "size " << persons << ": engine failed (exit " << e.exit_code
             << ") " << e.stderr_excerpt << '\n';
    } catch (const std::exception& e) {
      rec.status = "error";
      std::lock_guard<std::mutex> lk(io);
      if (log) *log << "size " << persons << ": " << e.what() << '\n';
    }

    rec.total_time = seconds_since(t0);
    rec.driver_time =
        std::max(0.0, rec.total_time - rec.ground_time - rec.solve_time);
    rec.max_rss_kb = current_max_rss_kb();

    std::lock_guard<std::mutex> lk(io);
    records[idx] = rec;
    if (csv.is_open()) csv << bench_csv_row(rec) << '\n' << std::flush;
    if (log)
      *log << "size " << persons << ": " << rec.status << " in " << std::fixed
           << std::setprecision(2) << rec.total_time << "s" << '\n';
  };

  if (cfg.parallel == 1) {
    for (size_t i = 0; i < cfg.sizes.size(); ++i) run_one(i);
  } else {
    std::atomic<size_t> next{0};
    size_t nthreads = std::min<size_t>(cfg.parallel, cfg.sizes.size());
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (size_t i = 0; i < nthreads; ++i)
      pool.emplace_back([&] {
        for (size_t j; (j = next.fetch_add(1)) < cfg.sizes.size();) run_one(j);
      });
    for (auto& t : pool) t.join();
  }
  return records;
}

} // namespace asptk
