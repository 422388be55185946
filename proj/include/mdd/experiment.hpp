#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdd/eval.hpp"
#include "mdd/suite.hpp"

namespace mdd {

/// Invalid or unreadable experiment configuration. `field` is a dotted path
/// such as "strategy[1].eta"; empty for syntax errors, which carry line/col in
/// the message instead.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct DistributionConfig {
  std::string family;
  std::string name;
  nlohmann::json params;
};

struct ExperimentConfig {
  int schema = 1;
  std::vector<DistributionConfig> distributions;
  std::vector<StrategySpec> strategies;
  std::vector<double> epsilons;
  EvalOptions eval;
  std::string output_path = "-";
  std::string format = "csv";
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Builds the joint for one configured distribution. Library errors are
/// reported as ConfigError against `field`.
NamedDist build_distribution(const DistributionConfig& config, const Caps& caps, std::uint64_t seed,
                             const std::string& field = "distribution");

struct RunRow {
  std::string distribution;
  EvalReport report;
};

struct RunResult {
  std::vector<RunRow> rows;
  std::string config_hash;
  double wall_seconds = 0.0;

  bool pass() const;
};

/// Validates every cell (distribution x strategy, distribution x epsilon)
/// before evaluating any of them, then evaluates cells on `threads` workers.
RunResult run_experiment(const ExperimentConfig& config, const std::string& config_text);

extern const char* const kCsvColumns[19];

std::string to_csv(const RunResult& result);
/// Rows plus provenance (config hash, tool version, wall clock).
std::string to_json(const RunResult& result);

std::string families_text();
nlohmann::json families_json();

const char* tool_version();

}  // namespace mdd
