#pragma once

// Experiment configuration, dispatch and reporting behind the `hyptime` tool.
//
// Configs are plain `key = value` lines; `#` starts a comment. Lists are
// comma separated. Command-line flags use the same keys and override the file.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyptime/map_factory.hpp"

namespace hyptime {

inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitInvariant = 4;

const std::vector<std::string>& subcommand_names();

/// A raw value and where it came from ("file.cfg:3" or "--sigma").
struct ConfigValue {
  std::string text;
  std::string origin;
};

using ConfigEntries = std::map<std::string, ConfigValue>;

/// Splits config text into entries. Malformed lines and unknown keys are
/// collected and thrown together as a ConfigError.
ConfigEntries parse_entries(const std::string& text, const std::string& source = "config");

/// Same, but appends violations to `violations` instead of throwing.
ConfigEntries parse_entries(const std::string& text, const std::string& source,
                            std::vector<std::string>& violations);

/// All recognized keys with their default values ("" when unset by default).
const std::vector<std::pair<std::string, std::string>>& config_defaults();

struct ExperimentConfig {
  std::string command = "scan";
  MapSpec map;
  double sigma = 0.78;
  double delta = 0.1;
  std::optional<double> b;
  double x0 = 0.3;
  std::int64_t N = 1000;
  std::int64_t samples = 100000;
  std::int64_t T = 16384;
  int bins = 20;
  int k = 256;
  int samples_per_cell = 1000;
  std::string ulam = "auto";
  double tol = 1e-12;
  int max_iter = 100000;
  std::string method = "pushforward";
  std::int64_t n = 50;
  std::uint64_t seed = 1;
  double p = 1.0;
  std::int64_t k_min = 1;
  std::optional<std::int64_t> i_max;
  std::vector<std::int64_t> t_grid;
  std::int64_t stride = 1;
  std::string mode = "float";
  std::int64_t bit_budget = 1000000;
  std::int64_t lyap_samples = 100;
  std::int64_t lyap_n = 10000;
  std::int64_t verify_samples = 2000;
  std::string out = "-";
  std::string json;
  bool timing = false;
};

/// Validates every entry (types, ranges, the b bound of the chosen map) and
/// reports all violations at once with their origins, after any `earlier`
/// ones from parsing.
ExperimentConfig build_config(const std::string& command, const ConfigEntries& entries,
                              const std::vector<std::string>& earlier = {});

/// parse_entries + build_config.
ExperimentConfig parse_config(const std::string& text, const std::string& command = "scan",
                              const std::string& source = "config");

nlohmann::json config_to_json(const ExperimentConfig& config);

struct RunReport {
  int schema_version = kSchemaVersion;
  std::string command;
  nlohmann::json config;
  nlohmann::json summary;
  /// Map iterations performed by the accepted samples.
  std::int64_t orbit_steps = 0;
  std::optional<double> wall_clock_s;
  /// False when an invariant suite reported a failure.
  bool passed = true;

  bool operator==(const RunReport&) const = default;
};

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

/// Runs the configured subcommand, writing its CSV table to `csv`.
RunReport run_experiment(const ExperimentConfig& config, std::ostream& csv);

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" otherwise.
std::string format_double(double x);

}  // namespace hyptime
