#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ahmsim {

// One row of the long-format result table.
struct ResultRow {
  std::string experiment;
  std::string series;
  int site = 0;
  double time_model = 0.0;
  double time_physical_s = 0.0;
  double value = 0.0;
  std::optional<double> stderr_value;
};

struct Diagnostic {
  std::string path;     // JSON pointer-ish field path
  std::string message;
  bool fatal = true;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::string figures;  // paper-figure cross reference
};

const std::vector<ExperimentInfo>& experiment_registry();

// Parses and schema-checks a config document. Unknown keys are rejected.
// Returns diagnostics; fatal ones prevent running.
std::vector<Diagnostic> validate_config(const nlohmann::json& config);

struct RunOverrides {
  std::optional<uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<int> threads;
};

struct RunOutcome {
  std::string output_dir;
  std::vector<std::string> files_written;
};

// Executes the experiment named in the config; writes data.csv, report.json
// and resolved_config.json into the output directory.
RunOutcome run_experiment(const nlohmann::json& config, const RunOverrides& overrides);

std::string result_table_csv(const std::vector<ResultRow>& rows);

}  // namespace ahmsim
