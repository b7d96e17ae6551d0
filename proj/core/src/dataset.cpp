#include "fedgraph/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "fedgraph/rng.hpp"

namespace fedgraph {

DatasetFormat parse_dataset_format(std::string_view id) {
  if (id == "movielens-tab") return DatasetFormat::kMovieLensTab;
  if (id == "csv-generic") return DatasetFormat::kCsvGeneric;
  throw std::invalid_argument(fmt::format("unknown dataset format '{}'", id));
}

std::string_view dataset_format_id(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::kMovieLensTab: return "movielens-tab";
    case DatasetFormat::kCsvGeneric: return "csv-generic";
  }
  throw std::logic_error("unreachable");
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_rating(std::string_view field, size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() ||
      !std::isfinite(value)) {
    throw std::runtime_error(
        fmt::format("malformed row at line {}: bad rating '{}'", line_no, field));
  }
  return value;
}

std::optional<int64_t> parse_timestamp(std::string_view field) {
  int64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

std::vector<RawInteraction> load_dataset(const std::filesystem::path& path,
                                         DatasetFormat format) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(fmt::format("cannot open dataset file '{}'", path.string()));
  }

  std::vector<RawInteraction> out;
  std::string line;
  size_t line_no = 0;
  const char sep = format == DatasetFormat::kMovieLensTab ? '\t' : ',';

  if (format == DatasetFormat::kCsvGeneric) {
    if (!std::getline(in, line)) return out;  // empty file
    ++line_no;
    auto header = split_fields(strip_cr(line), sep);
    if (header.size() < 3 || header[0] != "user" || header[1] != "item" ||
        header[2] != "rating" ||
        (header.size() == 4 && header[3] != "timestamp") || header.size() > 4) {
      throw std::runtime_error(fmt::format(
          "malformed row at line 1: expected header 'user,item,rating[,timestamp]', got '{}'",
          line));
    }
  }

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = strip_cr(line);
    if (sv.empty()) continue;
    auto fields = split_fields(sv, sep);
    const size_t min_fields = format == DatasetFormat::kMovieLensTab ? 4 : 3;
    if (fields.size() < min_fields || fields.size() > 4 || fields[0].empty() ||
        fields[1].empty()) {
      throw std::runtime_error(
          fmt::format("malformed row at line {}: '{}'", line_no, sv));
    }
    RawInteraction ri;
    ri.user_id = std::string(fields[0]);
    ri.item_id = std::string(fields[1]);
    ri.rating = parse_rating(fields[2], line_no);
    if (fields.size() >= 4) ri.timestamp = parse_timestamp(fields[3]);
    out.push_back(std::move(ri));
  }
  return out;
}

namespace {

struct SplitCounts {
  size_t train, valid, test;
};

// Floor valid and test, remainder to train. A positive train fraction makes
// the >=1 train edge guarantee hold automatically; the clamp below keeps it
// explicit.
SplitCounts split_counts(size_t n, SplitFractions f) {
  size_t n_valid = static_cast<size_t>(std::floor(f.valid * static_cast<double>(n)));
  size_t n_test = static_cast<size_t>(std::floor(f.test * static_cast<double>(n)));
  if (n_valid + n_test >= n && n > 0) {
    size_t excess = n_valid + n_test - n + 1;
    size_t cut = std::min(excess, n_valid);
    n_valid -= cut;
    excess -= cut;
    n_test -= std::min(excess, n_test);
  }
  return {n - n_valid - n_test, n_valid, n_test};
}

}  // namespace

InteractionDataset filter_and_split(const std::vector<RawInteraction>& raw,
                                    double rating_threshold,
                                    int min_interactions, SplitFractions split,
                                    uint64_t seed) {
  if (min_interactions < 1) {
    throw std::invalid_argument("min_interactions must be >= 1");
  }
  if (!(split.train > 0.0) || !(split.valid > 0.0) || !(split.test > 0.0) ||
      std::abs(split.train + split.valid + split.test - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must be positive and sum to 1");
  }

  // Deduplicate (user, item), keeping the highest rating.
  std::unordered_map<std::string, std::unordered_map<std::string, double>> best;
  for (const auto& ri : raw) {
    if (!std::isfinite(ri.rating)) {
      throw std::invalid_argument(
          fmt::format("non-finite rating for user '{}' item '{}'", ri.user_id, ri.item_id));
    }
    auto& cell = best[ri.user_id];
    auto it = cell.find(ri.item_id);
    if (it == cell.end() || ri.rating > it->second) cell[ri.item_id] = ri.rating;
  }

  // Threshold first, preserving first-appearance order of the surviving
  // (user, item) pairs so index assignment is deterministic.
  struct Kept {
    std::string user;
    std::string item;
  };
  std::vector<Kept> kept;
  {
    std::unordered_set<std::string> seen;  // (user \x1f item)
    for (const auto& ri : raw) {
      if (best.at(ri.user_id).at(ri.item_id) < rating_threshold) continue;
      std::string key = ri.user_id + '\x1f' + ri.item_id;
      if (!seen.insert(std::move(key)).second) continue;
      kept.push_back({ri.user_id, ri.item_id});
    }
  }

  // Iterate the low-degree user filter to a fixed point. Items are never
  // dropped for low degree.
  std::unordered_map<std::string, int> degree;
  for (const auto& k : kept) ++degree[k.user];
  bool changed = true;
  while (changed) {
    changed = false;
    std::unordered_set<std::string> drop;
    for (const auto& [user, deg] : degree) {
      if (deg < min_interactions) drop.insert(user);
    }
    if (drop.empty()) break;
    std::erase_if(kept, [&](const Kept& k) { return drop.contains(k.user); });
    degree.clear();
    for (const auto& k : kept) ++degree[k.user];
    changed = true;
  }
  if (kept.empty()) {
    throw std::runtime_error("empty dataset: every user was filtered out");
  }

  InteractionDataset ds;
  std::unordered_map<std::string, uint32_t> user_index;
  std::unordered_map<std::string, uint32_t> item_index;
  for (const auto& k : kept) {
    auto [uit, unew] = user_index.try_emplace(k.user, static_cast<uint32_t>(ds.user_ids.size()));
    if (unew) ds.user_ids.push_back(k.user);
    auto [iit, inew] = item_index.try_emplace(k.item, static_cast<uint32_t>(ds.item_ids.size()));
    if (inew) ds.item_ids.push_back(k.item);
    ds.edges.push_back({uit->second, iit->second});
  }

  // Per-user seeded permutation, independent of user iteration order.
  ds.partitions.assign(ds.edges.size(), Partition::kTrain);
  std::vector<std::vector<size_t>> per_user(ds.user_ids.size());
  for (size_t e = 0; e < ds.edges.size(); ++e) {
    per_user[ds.edges[e].user].push_back(e);
  }
  constexpr uint64_t kSplitTag = 0x73706c6974ULL;  // "split"
  for (uint32_t u = 0; u < ds.user_ids.size(); ++u) {
    auto& edge_ids = per_user[u];
    Rng rng(mix_seed(seed, kSplitTag, u));
    rng.shuffle(edge_ids);
    const auto counts = split_counts(edge_ids.size(), split);
    for (size_t i = 0; i < edge_ids.size(); ++i) {
      Partition part = i < counts.train ? Partition::kTrain
                       : i < counts.train + counts.valid ? Partition::kValid
                                                         : Partition::kTest;
      ds.partitions[edge_ids[i]] = part;
    }
  }
  return ds;
}

DatasetStats dataset_stats(const InteractionDataset& ds) {
  DatasetStats s;
  s.n_users = ds.n_users();
  s.n_items = ds.n_items();
  s.n_edges = ds.n_edges();
  const double cells = static_cast<double>(s.n_users) * static_cast<double>(s.n_items);
  s.sparsity = cells > 0.0 ? 1.0 - static_cast<double>(s.n_edges) / cells : 0.0;
  return s;
}

void write_split_manifest(const InteractionDataset& ds,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(fmt::format("cannot write manifest '{}'", path.string()));
  }
  static constexpr const char* kNames[] = {"train", "valid", "test"};
  for (size_t e = 0; e < ds.edges.size(); ++e) {
    out << ds.edges[e].user << ' ' << ds.edges[e].item << ' '
        << kNames[static_cast<int>(ds.partitions[e])] << '\n';
  }
}

UserItemLists build_user_item_lists(const InteractionDataset& ds) {
  UserItemLists lists;
  lists.train.resize(ds.n_users());
  lists.valid.resize(ds.n_users());
  lists.test.resize(ds.n_users());
  for (size_t e = 0; e < ds.edges.size(); ++e) {
    const auto& edge = ds.edges[e];
    switch (ds.partitions[e]) {
      case Partition::kTrain: lists.train[edge.user].push_back(edge.item); break;
      case Partition::kValid: lists.valid[edge.user].push_back(edge.item); break;
      case Partition::kTest: lists.test[edge.user].push_back(edge.item); break;
    }
  }
  for (auto* group : {&lists.train, &lists.valid, &lists.test}) {
    for (auto& v : *group) std::sort(v.begin(), v.end());
  }
  return lists;
}

}  // namespace fedgraph
