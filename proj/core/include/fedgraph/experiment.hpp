#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedgraph/dataset.hpp"
#include "fedgraph/federation.hpp"

namespace fedgraph {

struct PreprocessConfig {
  double rating_threshold = 3.0;  // inclusive: rating >= threshold retained
  int min_interactions = 15;
  SplitFractions split;
};

// One experiment: dataset + preprocessing + run configuration, plus optional
// sweep axes. The sweep grid is the cartesian product of the axes; an absent
// axis contributes the base config's single value.
struct ExperimentSpec {
  std::filesystem::path dataset_path;
  DatasetFormat format = DatasetFormat::kMovieLensTab;
  PreprocessConfig preprocess;
  RunConfig run;

  std::vector<int> sweep_clients_per_round;
  std::vector<AlphaMode> sweep_alpha_modes;
  std::vector<Strategy> sweep_user_strategies;
  std::vector<Strategy> sweep_item_strategies;
};

// Strict parser: unknown keys anywhere in the tree are hard errors, reported
// with their path.
ExperimentSpec load_spec(const std::filesystem::path& path);
ExperimentSpec spec_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json spec_to_json(const ExperimentSpec& spec);

// One sweep cell = a fully resolved run configuration.
std::vector<RunConfig> expand_sweep(const ExperimentSpec& spec);

// FNV-1a 64-bit over the canonical config serialization; echoed into result
// records so a cell can be re-run exactly.
uint64_t config_hash(const ExperimentSpec& spec, const RunConfig& cell);

struct ResultRecord {
  uint64_t config_hash = 0;
  RunConfig cell;
  std::filesystem::path dataset_path;
  DatasetFormat format = DatasetFormat::kMovieLensTab;
  PreprocessConfig preprocess;
  double test_ndcg_mean = 0.0;
  double test_ndcg_ci = 0.0;
  double test_hr_mean = 0.0;
  double test_hr_ci = 0.0;
  int best_round = 0;
  int rounds_run = 0;
  double wall_time_s = 0.0;
};

nlohmann::ordered_json result_record_to_json(const ResultRecord& rec);
nlohmann::ordered_json round_record_to_json(const RoundRecord& rec);

// Line-delimited records with a leading header record and stable field
// order. Overwrites path.
void write_results(const std::filesystem::path& path,
                   const std::vector<nlohmann::ordered_json>& records);

ResultRecord make_result_record(const ExperimentSpec& spec,
                                const RunConfig& cell, const RunReport& report,
                                double wall_time_s);

}  // namespace fedgraph
