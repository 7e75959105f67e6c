#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <json.hpp>

#include "chcprune/cfar/cfar.hpp"
#include "chcprune/core/io.hpp"
#include "chcprune/eval/eval.hpp"
#include "chcprune/harness/harness.hpp"
#include "chcprune/nlr/nlr.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace chcprune;

namespace {

enum Exit { ok = 0, config_error = 1, invariant_failure = 2 };

Program load(const std::string& path) {
  Program p = parse_file(path);
  validate(p);
  return p;
}

void write_out(const fs::path& dir, const std::string& file, const std::string& text) {
  fs::create_directories(dir);
  std::ofstream out(dir / file, std::ios::binary);
  out << text;
  if (!out) throw harness::ConfigError("cannot write " + (dir / file).string());
}

// Directories expand to the .clp files inside them.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& args) {
  std::vector<fs::path> out;
  for (const auto& a : args) {
    if (fs::is_directory(a)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(a))
        if (e.is_regular_file() && e.path().extension() == ".clp") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.emplace_back(a);
    }
  }
  return out;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Argument removal for constrained Horn clauses"};
  app.require_subcommand(1);

  bool as_json = false;
  std::string out_dir;
  std::string file;

  auto* parse = app.add_subcommand("parse", "Parse, validate and print a program");
  bool to_smt = false;
  parse->add_option("file", file, "Program (.clp)")->required();
  parse->add_flag("--smt2", to_smt, "Print the SMT-LIB encoding instead");
  parse->add_flag("--json", as_json, "Print a JSON summary");

  auto* nlr_cmd = app.add_subcommand("nlr", "Remove non-linking variables");
  nlr_cmd->add_option("file", file, "Program (.clp)")->required();
  nlr_cmd->add_option("--out-dir", out_dir, "Write program and report here");
  nlr_cmd->add_flag("--json", as_json, "Print program and report as JSON");

  auto* cfar_cmd = app.add_subcommand("cfar", "Erase redundant arguments");
  bool keep_names = false;
  cfar_cmd->add_option("file", file, "Program (.clp)")->required();
  cfar_cmd->add_option("--out-dir", out_dir, "Write program, erasure and report here");
  cfar_cmd->add_flag("--keep-names", keep_names, "Do not rename erased predicates");
  cfar_cmd->add_flag("--json", as_json, "Print program, erasure and report as JSON");

  harness::PipelineConfig cfg;
  std::vector<std::string> inputs;
  std::string stages = "nlr,cfar";
  std::string solver_cmd;
  std::int64_t bound = 0;
  auto* pipeline = app.add_subcommand("pipeline", "Run stages, emit artifacts, optionally solve");
  pipeline->add_option("inputs", inputs, "Programs or directories of .clp files")->required();
  pipeline->add_option("--stages", stages, "Comma separated subset of nlr,cfar, or none")->capture_default_str();
  pipeline->add_option("--solver-cmd", solver_cmd, "Solver command, {} is the .smt2 path");
  pipeline->add_option("--timeout", cfg.timeout, "Seconds per problem")->capture_default_str();
  auto* bound_opt = pipeline->add_option("--bound", bound, "Cross-check verdicts with the bounded model");
  pipeline->add_option("--out-dir", out_dir, "Artifact directory")->default_str("chcprune-out");
  pipeline->add_option("--jobs", cfg.jobs, "Problems run in parallel")->capture_default_str();
  pipeline->add_flag("--json", as_json, "Print JSON lines instead of the table");

  auto* eval_cmd = app.add_subcommand("eval", "Bounded least model");
  std::int64_t eval_bound = 32;
  bool full = false;
  eval_cmd->add_option("file", file, "Program (.clp)")->required();
  eval_cmd->add_option("--bound", eval_bound, "Domain is [-bound, bound]")->capture_default_str();
  eval_cmd->add_flag("--full", full, "Do not restrict to facts relevant to unsafe");
  eval_cmd->add_flag("--json", as_json, "Print JSON");

  auto* solve = app.add_subcommand("solve", "Run an external solver on one problem");
  double solve_timeout = 300;
  solve->add_option("file", file, "Problem (.smt2, or .clp to encode first)")->required();
  solve->add_option("--solver-cmd", solver_cmd, "Solver command, {} is the .smt2 path")->required();
  solve->add_option("--timeout", solve_timeout, "Seconds")->capture_default_str();
  solve->add_option("--out-dir", out_dir, "Where a .clp input is encoded")->default_str("chcprune-out");
  solve->add_flag("--json", as_json, "Print JSON");

  auto* report_cmd = app.add_subcommand("report", "Render JSON line records as a table");
  std::vector<std::string> record_files;
  report_cmd->add_option("records", record_files, "JSON lines files, one column per configuration")->required();
  report_cmd->add_flag("--json", as_json, "Print the merged JSON lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*parse) {
      Program p = load(file);
      if (as_json) {
        json preds = json::object();
        for (const auto& [name, n] : arities(p)) preds[name] = n;
        std::cout << json{{"clauses", p.clauses.size()}, {"predicates", preds}, {"total_arity", total_arity(p)}}.dump(2)
                  << "\n";
      } else {
        std::cout << (to_smt ? emit_smtlib_horn(p) : emit_clp(p));
      }
      return ok;
    }

    if (*nlr_cmd) {
      auto r = nlr::transform(load(file));
      std::string program = emit_clp(r.program), text = harness::to_text(r.report);
      if (!out_dir.empty()) {
        write_out(out_dir, stem_of(file) + ".nlr.clp", program);
        write_out(out_dir, stem_of(file) + ".nlr.report", text);
      }
      if (as_json) {
        std::cout << json{{"program", program}, {"report", harness::to_json(r.report)}}.dump(2) << "\n";
      } else {
        std::cout << program;
        std::cerr << text;
      }
      return ok;
    }

    if (*cfar_cmd) {
      Program in = load(file);
      cfar::Options o;
      o.naming.keep_names = keep_names;
      auto r = cfar::transform(in, o);
      std::string program = emit_clp(r.program), text = harness::to_text(r.report);
      std::string erasure = cfar::serialize(r.erasure, arities(in));
      if (!out_dir.empty()) {
        write_out(out_dir, stem_of(file) + ".cfar.clp", program);
        write_out(out_dir, stem_of(file) + ".cfar.erasure", erasure);
        write_out(out_dir, stem_of(file) + ".cfar.report", text);
      }
      if (as_json) {
        json lines = json::array();
        std::istringstream es(erasure);
        for (std::string l; std::getline(es, l);) lines.push_back(l);
        std::cout << json{{"program", program}, {"erasure", lines}, {"report", harness::to_json(r.report)}}.dump(2)
                  << "\n";
      } else {
        std::cout << program;
        std::cerr << text;
        std::istringstream es(erasure);
        for (std::string l; std::getline(es, l);) std::cerr << "erasure: " << l << "\n";
      }
      return ok;
    }

    if (*pipeline) {
      cfg.inputs = expand_inputs(inputs);
      cfg.stages = harness::parse_stages(stages);
      if (!solver_cmd.empty()) cfg.solver_cmd = solver_cmd;
      if (*bound_opt) cfg.bound = bound;
      cfg.out_dir = out_dir.empty() ? "chcprune-out" : out_dir;
      cfg.validate();
      if (cfg.inputs.empty()) throw harness::ConfigError("no inputs");
      auto records = harness::run_pipeline(cfg);
      std::string table = harness::report(records), lines = harness::json_lines(records);
      write_out(cfg.out_dir, "records.jsonl", lines);
      write_out(cfg.out_dir, "report.txt", table);
      std::cout << (as_json ? lines : table);
      bool broken = false;
      for (const auto& r : records) {
        if (r.error) std::cerr << r.name << ": " << *r.error << "\n";
        for (const auto& v : r.violations) std::cerr << r.name << ": " << v << "\n";
        broken = broken || !r.violations.empty();
      }
      return broken ? invariant_failure : ok;
    }

    if (*eval_cmd) {
      Program p = load(file);
      eval::Options o{!full, false};
      std::string verdict;
      json facts = json::object();
      std::size_t total = 0;
      bool clipped = false;
      try {
        auto m = eval::bounded_least_model(p, eval_bound, o);
        verdict = m.unsafe_derived ? "holds" : m.clipped ? "unknown" : "fails";
        for (const auto& [pred, fs] : m.facts) facts[pred] = fs.size();
        total = m.fact_count();
        clipped = m.clipped;
      } catch (const eval::BudgetExceeded& e) {
        verdict = "unknown";
        std::cerr << e.what() << "\n";
      }
      if (as_json) {
        std::cout << json{{"unsafe", verdict}, {"bound", eval_bound}, {"clipped", clipped}, {"facts", total},
                          {"by_predicate", facts}}
                         .dump(2)
                  << "\n";
      } else {
        std::cout << "unsafe: " << verdict << "\n";
        std::cout << "clipped: " << (clipped ? "true" : "false") << "\n";
        std::cout << "facts: " << total << "\n";
        for (const auto& [pred, n] : facts.items()) std::cout << "facts." << pred << ": " << n << "\n";
      }
      return ok;
    }

    if (*solve) {
      harness::PipelineConfig check;
      check.solver_cmd = solver_cmd;
      check.timeout = solve_timeout;
      check.validate();
      fs::path smt = file;
      if (smt.extension() == ".clp") {
        fs::path dir = out_dir.empty() ? "chcprune-out" : out_dir;
        write_out(dir, stem_of(file) + ".smt2", emit_smtlib_horn(load(file)));
        smt = dir / (stem_of(file) + ".smt2");
      } else if (!fs::exists(smt)) {
        throw harness::ConfigError("no such file: " + file);
      }
      auto res = harness::solve_external(smt, solver_cmd, solve_timeout);
      if (as_json)
        std::cout << json{{"verdict", harness::to_string(res.verdict)}, {"elapsed", res.elapsed}}.dump() << "\n";
      else
        std::cout << harness::to_string(res.verdict) << " " << res.elapsed << "\n";
      return ok;
    }

    if (*report_cmd) {
      std::vector<harness::RunRecord> records;
      for (const auto& f : record_files) {
        std::ifstream in(f);
        if (!in) throw harness::ConfigError("cannot read " + f);
        std::size_t lineno = 0;
        for (std::string line; std::getline(in, line);) {
          ++lineno;
          if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
          try {
            records.push_back(harness::record_from_json(json::parse(line)));
          } catch (const std::exception& e) {
            throw harness::ConfigError(f + ":" + std::to_string(lineno) + ": " + e.what());
          }
        }
      }
      std::cout << (as_json ? harness::json_lines(records) : harness::report(records));
      return ok;
    }
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return invariant_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  }
  return ok;
}
