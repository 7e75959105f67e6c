#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chcprune/cfar/cfar.hpp"
#include "chcprune/constraints/analysis.hpp"
#include "chcprune/core/syntax.hpp"
#include "chcprune/nlr/nlr.hpp"

namespace chcprune::harness {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Stage { nlr, cfar };

std::string_view to_string(Stage s);
/// Comma separated; empty or `none` gives no stages. Throws ConfigError on
/// unknown names and duplicates.
std::vector<Stage> parse_stages(std::string_view csv);
/// `nlr;cfar`, or `none`.
std::string stages_label(const std::vector<Stage>& stages);

struct PipelineConfig {
  std::vector<std::filesystem::path> inputs;
  std::vector<Stage> stages;
  /// Whitespace separated argv; `{}` stands for the .smt2 path.
  std::optional<std::string> solver_cmd;
  double timeout = 300;
  std::filesystem::path out_dir = "chcprune-out";
  std::optional<std::int64_t> bound;
  unsigned jobs = 1;

  /// Throws ConfigError.
  void validate() const;
};

enum class Verdict { sat, unsat, unknown, timeout, skipped };
enum class Classification { safe, unsafe, undetermined };

std::string_view to_string(Verdict v);
std::string_view to_string(Classification c);
Verdict parse_verdict(std::string_view s);
/// sat means the clauses have a model, so the program is safe.
Classification classify(Verdict v);

struct StageRun {
  Stage stage;
  double seconds = 0;
  std::size_t arity_after = 0;
};

struct RunRecord {
  std::string name;
  std::string config;
  std::vector<StageRun> stages;
  Verdict verdict = Verdict::skipped;
  double solve_time = 0;
  Classification classification = Classification::undetermined;
  std::size_t arity_before = 0;
  std::size_t arity_after = 0;
  /// derives_unsafe on the input, when a bound is configured.
  std::optional<TriState> oracle;
  /// Size of the erasure cfar finds on its own output.
  std::optional<std::size_t> second_erasure;
  std::vector<std::string> artifacts;
  /// Input could not be read, parsed or transformed.
  std::optional<std::string> error;
  /// Broken artifacts, or oracle and solver disagreeing.
  std::vector<std::string> violations;

  std::optional<double> stage_time(Stage s) const;
};

nlohmann::json to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);

struct SolveResult {
  Verdict verdict = Verdict::skipped;
  double elapsed = 0;
};

/// Runs the solver on `smt_path` and classifies the first token it prints.
/// Spawn failure gives skipped; running past `timeout` seconds kills the
/// process group and gives (timeout, timeout).
SolveResult solve_external(const std::filesystem::path& smt_path, const std::string& command, double timeout);

/// One problem. Artifacts go to `dir`.
RunRecord run_problem(const std::filesystem::path& input, const std::string& name, const std::filesystem::path& dir,
                      const PipelineConfig& cfg);

/// All inputs, up to cfg.jobs at a time, each in out_dir/<name>. Records are
/// sorted by name.
std::vector<RunRecord> run_pipeline(const PipelineConfig& cfg);

/// Table with one column per configuration, in order of first appearance.
std::string report(const std::vector<RunRecord>& records);
/// One JSON object per line.
std::string json_lines(const std::vector<RunRecord>& records);

/// Row labels of the table, top to bottom.
const std::vector<std::string>& report_rows();

/// key: value lines.
std::string to_text(const nlr::Report& r);
std::string to_text(const cfar::Report& r);
nlohmann::json to_json(const nlr::Report& r);
nlohmann::json to_json(const cfar::Report& r);

}  // namespace chcprune::harness
