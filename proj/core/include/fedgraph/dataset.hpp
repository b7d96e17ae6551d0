#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fedgraph {

struct RawInteraction {
  std::string user_id;
  std::string item_id;
  double rating = 0.0;
  std::optional<int64_t> timestamp;
};

enum class DatasetFormat { kMovieLensTab, kCsvGeneric };

DatasetFormat parse_dataset_format(std::string_view id);
std::string_view dataset_format_id(DatasetFormat format);

enum class Partition : uint8_t { kTrain = 0, kValid = 1, kTest = 2 };

struct Edge {
  uint32_t user;
  uint32_t item;
  bool operator==(const Edge&) const = default;
};

// Filtered interaction table over dense, re-compacted user/item index spaces.
// edges and partitions are parallel arrays.
struct InteractionDataset {
  std::vector<std::string> user_ids;  // dense user index -> original id
  std::vector<std::string> item_ids;  // dense item index -> original id
  std::vector<Edge> edges;
  std::vector<Partition> partitions;

  uint32_t n_users() const { return static_cast<uint32_t>(user_ids.size()); }
  uint32_t n_items() const { return static_cast<uint32_t>(item_ids.size()); }
  size_t n_edges() const { return edges.size(); }
};

struct SplitFractions {
  double train = 0.7;
  double valid = 0.1;
  double test = 0.2;
};

struct DatasetStats {
  uint32_t n_users = 0;
  uint32_t n_items = 0;
  uint64_t n_edges = 0;
  double sparsity = 0.0;
};

// Parses one interaction per row. movielens-tab rows are
// `user<TAB>item<TAB>rating<TAB>timestamp`; csv-generic expects a
// `user,item,rating[,timestamp]` header line. Malformed rows are reported
// with their line number.
std::vector<RawInteraction> load_dataset(const std::filesystem::path& path,
                                         DatasetFormat format);

// Deduplicates repeated (user, item) pairs keeping the highest rating, drops
// edges below rating_threshold, iteratively removes users with fewer than
// min_interactions edges, re-compacts indices, and splits each user's edges
// into train/valid/test by a seeded per-user permutation. Valid and test
// counts are floored; the remainder goes to train; every user keeps at least
// one train edge.
InteractionDataset filter_and_split(const std::vector<RawInteraction>& raw,
                                    double rating_threshold,
                                    int min_interactions, SplitFractions split,
                                    uint64_t seed);

DatasetStats dataset_stats(const InteractionDataset& ds);

// Audit file: one `user_idx item_idx partition` line per edge.
void write_split_manifest(const InteractionDataset& ds,
                          const std::filesystem::path& path);

// Per-user item lists by partition, each sorted ascending. Built once and
// shared by the trainer and the evaluator.
struct UserItemLists {
  std::vector<std::vector<uint32_t>> train;
  std::vector<std::vector<uint32_t>> valid;
  std::vector<std::vector<uint32_t>> test;
};

UserItemLists build_user_item_lists(const InteractionDataset& ds);

}  // namespace fedgraph
