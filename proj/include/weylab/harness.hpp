#pragma once

// Experiment configuration, dispatch to the library, and emission of
// reproducible run records (JSON) and tables (CSV).

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace weylab {

using ojson = nlohmann::ordered_json;

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitInconclusive = 3 };

/// Bad user input; maps to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string subcommand;
  ojson params = ojson::object();
  std::optional<std::uint64_t> seed;
  std::string output;          // empty: stdout
  std::string format = "json";  // json | csv

  ojson to_json() const;
  static ExperimentConfig from_json(const ojson& j);
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<ojson>> rows;  // numbers or strings
};

struct RunRecord {
  ExperimentConfig config;
  std::string tool_version{kToolVersion};
  double wall_seconds = 0.0;
  ojson payload = ojson::object();
  std::optional<CsvTable> table;
  int exit_code = kExitOk;

  ojson to_json() const;
};

/// Subcommands that draw random numbers and therefore need --seed.
bool is_stochastic(const ExperimentConfig& cfg);

/// Validates the config, runs the mapped operation and fills the record.
/// Throws ValidationError for bad parameters.
RunRecord run_experiment(const ExperimentConfig& cfg);

/// 17 significant digits.
std::string format_number(double v);
std::string to_csv(const CsvTable& table);
/// Writes the record (json) or its table (csv) to cfg.output or stdout.
void emit(const RunRecord& record, const std::string& format);

}  // namespace weylab
