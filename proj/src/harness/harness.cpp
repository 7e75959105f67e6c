#include "chcprune/harness/harness.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "chcprune/core/io.hpp"
#include "chcprune/eval/eval.hpp"

namespace chcprune::harness {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixed2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + p.string());
}

std::optional<TriState> parse_tristate(std::string_view s) {
  for (auto t : {TriState::holds, TriState::fails, TriState::unknown})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

bool uses_arrays(const Program& p) {
  for (const auto& c : p.clauses)
    if (has_array_constraints(c.constraint)) return true;
  return false;
}

std::vector<std::string> split_command(const std::string& command, const std::string& path) {
  std::istringstream in(command);
  std::vector<std::string> argv;
  for (std::string tok; in >> tok;) {
    for (std::size_t at = tok.find("{}"); at != std::string::npos; at = tok.find("{}", at + path.size()))
      tok.replace(at, 2, path);
    argv.push_back(tok);
  }
  return argv;
}

}  // namespace

std::string_view to_string(Stage s) { return s == Stage::nlr ? "nlr" : "cfar"; }

std::vector<Stage> parse_stages(std::string_view csv) {
  std::vector<Stage> out;
  if (csv.empty() || csv == "none") return out;
  std::size_t start = 0;
  for (;;) {
    auto end = csv.find(',', start);
    auto name = csv.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    Stage s;
    if (name == "nlr")
      s = Stage::nlr;
    else if (name == "cfar")
      s = Stage::cfar;
    else
      throw ConfigError("unknown stage '" + std::string(name) + "' (expected nlr or cfar)");
    if (std::find(out.begin(), out.end(), s) != out.end()) throw ConfigError("stage listed twice: " + std::string(name));
    out.push_back(s);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::string stages_label(const std::vector<Stage>& stages) {
  if (stages.empty()) return "none";
  std::string out;
  for (auto s : stages) out += (out.empty() ? "" : ";") + std::string(to_string(s));
  return out;
}

void PipelineConfig::validate() const {
  if (!(timeout > 0)) throw ConfigError("timeout must be positive");
  if (jobs == 0) throw ConfigError("jobs must be at least 1");
  if (bound && *bound < 0) throw ConfigError("bound must be non-negative");
  std::set<Stage> seen;
  for (auto s : stages)
    if (!seen.insert(s).second) throw ConfigError("stage listed twice: " + std::string(to_string(s)));
  if (solver_cmd) {
    if (solver_cmd->find("{}") == std::string::npos) throw ConfigError("solver command needs a {} placeholder");
    if (split_command(*solver_cmd, "x").empty()) throw ConfigError("empty solver command");
  }
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::sat: return "sat";
    case Verdict::unsat: return "unsat";
    case Verdict::unknown: return "unknown";
    case Verdict::timeout: return "timeout";
    case Verdict::skipped: return "skipped";
  }
  return "?";
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::safe: return "safe";
    case Classification::unsafe: return "unsafe";
    case Classification::undetermined: return "undetermined";
  }
  return "?";
}

Verdict parse_verdict(std::string_view s) {
  for (auto v : {Verdict::sat, Verdict::unsat, Verdict::unknown, Verdict::timeout, Verdict::skipped})
    if (to_string(v) == s) return v;
  throw Error("unknown verdict '" + std::string(s) + "'");
}

Classification classify(Verdict v) {
  if (v == Verdict::sat) return Classification::safe;
  if (v == Verdict::unsat) return Classification::unsafe;
  return Classification::undetermined;
}

std::optional<double> RunRecord::stage_time(Stage s) const {
  for (const auto& st : stages)
    if (st.stage == s) return st.seconds;
  return std::nullopt;
}

json to_json(const RunRecord& r) {
  json stages = json::array();
  for (const auto& s : r.stages)
    stages.push_back({{"stage", to_string(s.stage)}, {"seconds", s.seconds}, {"arity_after", s.arity_after}});
  json j{{"name", r.name},
         {"config", r.config},
         {"stages", stages},
         {"verdict", to_string(r.verdict)},
         {"solve_time", r.solve_time},
         {"classification", to_string(r.classification)},
         {"arity_before", r.arity_before},
         {"arity_after", r.arity_after},
         {"artifacts", r.artifacts},
         {"violations", r.violations}};
  j["oracle"] = r.oracle ? json(to_string(*r.oracle)) : json(nullptr);
  j["second_erasure"] = r.second_erasure ? json(*r.second_erasure) : json(nullptr);
  j["error"] = r.error ? json(*r.error) : json(nullptr);
  return j;
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.name = j.at("name").get<std::string>();
  r.config = j.at("config").get<std::string>();
  for (const auto& s : j.at("stages")) {
    auto st = parse_stages(s.at("stage").get<std::string>());
    if (st.size() != 1) throw Error("bad stage entry");
    r.stages.push_back({st[0], s.at("seconds").get<double>(), s.value("arity_after", std::size_t{0})});
  }
  r.verdict = parse_verdict(j.at("verdict").get<std::string>());
  r.solve_time = j.value("solve_time", 0.0);
  r.classification = classify(r.verdict);
  r.arity_before = j.value("arity_before", std::size_t{0});
  r.arity_after = j.value("arity_after", std::size_t{0});
  if (j.contains("oracle") && j["oracle"].is_string()) r.oracle = parse_tristate(j["oracle"].get<std::string>());
  if (j.contains("second_erasure") && j["second_erasure"].is_number())
    r.second_erasure = j["second_erasure"].get<std::size_t>();
  if (j.contains("error") && j["error"].is_string()) r.error = j["error"].get<std::string>();
  if (j.contains("artifacts")) r.artifacts = j["artifacts"].get<std::vector<std::string>>();
  if (j.contains("violations")) r.violations = j["violations"].get<std::vector<std::string>>();
  return r;
}

SolveResult solve_external(const fs::path& smt_path, const std::string& command, double timeout) {
  auto argv = split_command(command, smt_path.string());
  if (argv.empty()) return {Verdict::skipped, 0};
  std::vector<char*> cargv;
  for (auto& a : argv) cargv.push_back(a.data());
  cargv.push_back(nullptr);

  int out[2], err[2];
  if (pipe2(out, O_CLOEXEC) != 0) return {Verdict::skipped, 0};
  if (pipe2(err, O_CLOEXEC) != 0) {
    close(out[0]);
    close(out[1]);
    return {Verdict::skipped, 0};
  }
  auto t0 = Clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    for (int fd : {out[0], out[1], err[0], err[1]}) close(fd);
    return {Verdict::skipped, 0};
  }
  if (pid == 0) {
    setpgid(0, 0);
    int null = open("/dev/null", O_RDWR);
    dup2(null, 0);
    dup2(out[1], 1);
    dup2(null, 2);
    execvp(cargv[0], cargv.data());
    int e = errno;
    ssize_t ignored = write(err[1], &e, sizeof e);
    (void)ignored;
    _exit(127);
  }
  setpgid(pid, pid);
  close(out[1]);
  close(err[1]);

  int spawn_errno = 0;
  ssize_t n = read(err[0], &spawn_errno, sizeof spawn_errno);
  close(err[0]);
  if (n > 0) {
    close(out[0]);
    waitpid(pid, nullptr, 0);
    return {Verdict::skipped, since(t0)};
  }

  fcntl(out[0], F_SETFL, O_NONBLOCK);
  std::string text;
  auto drain = [&] {
    char buf[4096];
    for (;;) {
      ssize_t k = read(out[0], buf, sizeof buf);
      if (k <= 0) return k == 0;
      if (text.size() < 65536) text.append(buf, static_cast<std::size_t>(k));
    }
  };
  bool eof = false, exited = false;
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout));
  while (!exited) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) {
      kill(-pid, SIGKILL);
      waitpid(pid, nullptr, 0);
      close(out[0]);
      return {Verdict::timeout, timeout};
    }
    if (!eof) {
      pollfd p{out[0], POLLIN, 0};
      poll(&p, 1, static_cast<int>(std::min<long long>(left, 20)));
      eof = drain();
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(std::min<long long>(left, 5)));
    }
    int status = 0;
    if (waitpid(pid, &status, WNOHANG) == pid) exited = true;
  }
  double elapsed = since(t0);
  drain();
  close(out[0]);
  // Leftover children of the solver.
  kill(-pid, SIGKILL);

  std::istringstream in(text);
  std::string tok;
  in >> tok;
  if (tok == "sat") return {Verdict::sat, elapsed};
  if (tok == "unsat") return {Verdict::unsat, elapsed};
  return {Verdict::unknown, elapsed};
}

RunRecord run_problem(const fs::path& input, const std::string& name, const fs::path& dir, const PipelineConfig& cfg) {
  RunRecord r;
  r.name = name;
  r.config = stages_label(cfg.stages);
  Program prog;
  try {
    prog = parse_file(input);
    validate(prog);
  } catch (const std::exception& e) {
    r.error = e.what();
    return r;
  }
  r.arity_before = r.arity_after = total_arity(prog);

  if (cfg.bound) {
    try {
      r.oracle = eval::derives_unsafe(prog, *cfg.bound);
    } catch (const Error&) {
      // arrays
    }
  }

  fs::path last_smt;
  auto emit = [&](const std::string& tag, const Program& p) {
    fs::path clp = dir / (name + "." + tag + ".clp");
    fs::path smt = dir / (name + "." + tag + ".smt2");
    std::string text = emit_clp(p);
    write_file(clp, text);
    SmtOptions so;
    so.arrays = uses_arrays(p);
    write_file(smt, emit_smtlib_horn(p, so));
    r.artifacts.push_back(clp.string());
    r.artifacts.push_back(smt.string());
    last_smt = smt;
    try {
      Program back = parse_file(clp);
      validate(back);
      if (!(back == p)) r.violations.push_back(clp.filename().string() + " does not re-parse to the emitted program");
    } catch (const std::exception& e) {
      r.violations.push_back(clp.filename().string() + ": " + e.what());
    }
  };

  try {
    fs::create_directories(dir);
    emit("input", prog);
    for (auto s : cfg.stages) {
      auto t0 = Clock::now();
      if (s == Stage::nlr) {
        prog = nlr::transform(prog).program;
        r.stages.push_back({s, since(t0), total_arity(prog)});
      } else {
        auto res = cfar::transform(prog);
        double t = since(t0);
        auto before = prog;
        prog = std::move(res.program);
        r.stages.push_back({s, t, total_arity(prog)});
        fs::path er = dir / (name + ".cfar.erasure");
        write_file(er, cfar::serialize(res.erasure, arities(before)));
        r.artifacts.push_back(er.string());
        r.second_erasure = cfar::transform(prog).erasure.size();
      }
      emit(std::string(to_string(s)), prog);
    }
  } catch (const InternalError& e) {
    r.error = e.what();
    r.violations.push_back(e.what());
    return r;
  } catch (const std::exception& e) {
    r.error = e.what();
    return r;
  }
  r.arity_after = total_arity(prog);

  if (cfg.solver_cmd) {
    auto res = solve_external(last_smt, *cfg.solver_cmd, cfg.timeout);
    r.verdict = res.verdict;
    r.solve_time = res.elapsed;
  }
  r.classification = classify(r.verdict);
  if (r.oracle && *r.oracle != TriState::unknown && r.classification != Classification::undetermined) {
    auto expected = *r.oracle == TriState::holds ? Classification::unsafe : Classification::safe;
    if (expected != r.classification)
      r.violations.push_back("solver says " + std::string(to_string(r.verdict)) + " but the bounded model says unsafe " +
                             std::string(to_string(*r.oracle)));
  }
  return r;
}

std::vector<RunRecord> run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  std::vector<std::string> names;
  std::map<std::string, int> used;
  for (const auto& in : cfg.inputs) {
    std::string base = in.stem().string();
    if (base.empty()) base = "problem";
    std::string name = base;
    while (used.count(name)) name = base + "-" + std::to_string(++used[base]);
    used[name] = 1;
    names.push_back(name);
  }

  std::vector<RunRecord> records(cfg.inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < cfg.inputs.size();) {
      try {
        records[i] = run_problem(cfg.inputs[i], names[i], cfg.out_dir / names[i], cfg);
      } catch (const std::exception& e) {
        records[i].name = names[i];
        records[i].config = stages_label(cfg.stages);
        records[i].error = e.what();
      }
    }
  };
  unsigned jobs = std::min<std::size_t>(cfg.jobs, std::max<std::size_t>(cfg.inputs.size(), 1));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) { return a.name < b.name; });
  return records;
}

const std::vector<std::string>& report_rows() {
  static const std::vector<std::string> rows{"c", "s", "u", "to", "n", "t_NLR", "t_cFAR", "st", "tt", "at"};
  return rows;
}

std::string report(const std::vector<RunRecord>& records) {
  struct Column {
    std::string config;
    std::size_t s = 0, u = 0, to = 0, n = 0;
    bool has_nlr = true, has_cfar = true;
    double t_nlr = 0, t_cfar = 0, st = 0;
  };
  std::vector<Column> cols;
  std::size_t errors = 0, violations = 0, cfar_runs = 0, nonempty_second = 0;
  for (const auto& r : records) {
    auto it = std::find_if(cols.begin(), cols.end(), [&](const Column& c) { return c.config == r.config; });
    if (it == cols.end()) {
      Column c;
      c.config = r.config;
      std::set<std::string> parts;
      std::istringstream in(r.config);
      for (std::string part; std::getline(in, part, ';');) parts.insert(part);
      c.has_nlr = parts.count("nlr") > 0;
      c.has_cfar = parts.count("cfar") > 0;
      cols.push_back(c);
      it = cols.end() - 1;
    }
    ++it->n;
    if (r.error) ++errors;
    violations += r.violations.size();
    if (r.second_erasure) {
      ++cfar_runs;
      if (*r.second_erasure > 0) ++nonempty_second;
    }
    if (r.verdict == Verdict::timeout) ++it->to;
    if (r.verdict != Verdict::sat && r.verdict != Verdict::unsat) continue;
    ++(r.verdict == Verdict::sat ? it->s : it->u);
    it->t_nlr += r.stage_time(Stage::nlr).value_or(0);
    it->t_cfar += r.stage_time(Stage::cfar).value_or(0);
    it->st += r.solve_time;
  }
  if (cols.empty()) cols.push_back(Column{"-"});

  std::vector<std::vector<std::string>> cells;
  for (const auto& c : cols) {
    std::size_t correct = c.s + c.u;
    double tt = c.t_nlr + c.t_cfar + c.st;
    cells.push_back({std::to_string(correct), std::to_string(c.s), std::to_string(c.u), std::to_string(c.to),
                     std::to_string(c.n), c.has_nlr ? fixed2(c.t_nlr) : "--", c.has_cfar ? fixed2(c.t_cfar) : "--",
                     fixed2(c.st), fixed2(tt), correct ? fixed2(tt / static_cast<double>(correct)) : "--"});
  }

  std::vector<std::size_t> width;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    std::size_t w = cols[k].config.size();
    for (const auto& cell : cells[k]) w = std::max(w, cell.size());
    width.push_back(w);
  }
  auto pad_left = [](const std::string& s, std::size_t w) { return std::string(w - std::min(w, s.size()), ' ') + s; };
  const std::size_t label_w = 8;
  std::ostringstream out;
  out << std::string(label_w, ' ');
  for (std::size_t k = 0; k < cols.size(); ++k) out << "  " << pad_left(cols[k].config, width[k]);
  out << "\n";
  const auto& rows = report_rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i] << std::string(label_w - rows[i].size(), ' ');
    for (std::size_t k = 0; k < cols.size(); ++k) out << "  " << pad_left(cells[k][i], width[k]);
    out << "\n";
  }
  out << "\n";
  out << "errors: " << errors << "\n";
  out << "violations: " << violations << "\n";
  if (cfar_runs)
    out << "idempotence: " << nonempty_second << " of " << cfar_runs << " cfar outputs admit a further erasure\n";
  return out.str();
}

std::string json_lines(const std::vector<RunRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  return out;
}

std::string to_text(const nlr::Report& r) {
  std::ostringstream out;
  out << "definitions: " << r.definitions << "\n"
      << "widenings: " << r.widenings << "\n"
      << "iterations: " << r.iterations << "\n"
      << "iteration_bound: " << r.iteration_bound() << "\n"
      << "variant_classes: " << r.variant_classes << "\n"
      << "max_arity: " << r.max_arity << "\n"
      << "max_unfoldings_per_definition: " << r.max_unfoldings_per_definition << "\n"
      << "dropped_clauses: " << r.dropped_clauses << "\n"
      << "arity_before: " << r.arity_before << "\n"
      << "arity_after: " << r.arity_after << "\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  return out.str();
}

std::string to_text(const cfar::Report& r) {
  std::ostringstream out;
  out << "pairs_total: " << r.pairs_total << "\n"
      << "pairs_kept: " << r.pairs_kept << "\n"
      << "pairs_removed: " << r.pairs_removed << "\n"
      << "passes: " << r.passes << "\n";
  for (const auto& [cond, k] : r.removed_by_condition) out << "removed." << cfar::to_string(cond) << ": " << k << "\n";
  out << "arity_before: " << r.arity_before << "\n"
      << "arity_after: " << r.arity_after << "\n";
  for (const auto& v : r.violations)
    out << "removal: " << v.pair.first << " " << v.pair.second << " clause " << v.clause_index << " "
        << cfar::to_string(v.condition) << "\n";
  for (const auto& [from, to] : r.renamed) out << "renamed: " << from << " " << to << "\n";
  return out.str();
}

json to_json(const nlr::Report& r) {
  return {{"definitions", r.definitions},
          {"widenings", r.widenings},
          {"iterations", r.iterations},
          {"iteration_bound", r.iteration_bound()},
          {"variant_classes", r.variant_classes},
          {"max_arity", r.max_arity},
          {"max_unfoldings_per_definition", r.max_unfoldings_per_definition},
          {"dropped_clauses", r.dropped_clauses},
          {"arity_before", r.arity_before},
          {"arity_after", r.arity_after},
          {"warnings", r.warnings}};
}

json to_json(const cfar::Report& r) {
  json by = json::object();
  for (const auto& [cond, k] : r.removed_by_condition) by[std::string(cfar::to_string(cond))] = k;
  json removals = json::array();
  for (const auto& v : r.violations)
    removals.push_back({{"predicate", v.pair.first},
                        {"position", v.pair.second},
                        {"clause", v.clause_index},
                        {"condition", cfar::to_string(v.condition)}});
  return {{"pairs_total", r.pairs_total},
          {"pairs_kept", r.pairs_kept},
          {"pairs_removed", r.pairs_removed},
          {"passes", r.passes},
          {"removed_by_condition", by},
          {"arity_before", r.arity_before},
          {"arity_after", r.arity_after},
          {"removals", removals},
          {"renamed", r.renamed}};
}

}  // namespace chcprune::harness
