#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "fedgraph/dataset.hpp"

namespace fedgraph {

// Bipartite adjacency over train edges only. Item lists per user and user
// lists per item are sorted ascending.
struct GlobalGraph {
  std::vector<std::vector<uint32_t>> user_items;
  std::vector<std::vector<uint32_t>> item_users;

  uint32_t n_users() const { return static_cast<uint32_t>(user_items.size()); }
  uint32_t n_items() const { return static_cast<uint32_t>(item_users.size()); }
};

GlobalGraph build_global_graph(const InteractionDataset& ds);

enum class EdgeScope { kAnchorOnly, kAllLocal };

EdgeScope parse_edge_scope(std::string_view id);
std::string_view edge_scope_id(EdgeScope scope);

// One client's local world: the anchor user plus users expanded in by shared
// train interactions. expanded_users keeps the anchor first, followed by
// neighbors in rank order (shared-item count desc, user index asc).
// local_items is sorted ascending. local_edges hold global indices.
struct LocalSubgraph {
  uint32_t anchor = 0;
  std::vector<uint32_t> expanded_users;
  std::vector<uint32_t> local_items;
  std::vector<Edge> local_edges;

  bool contains_user(uint32_t user) const;
  // Position of `user` in expanded_users, or -1.
  int64_t user_position(uint32_t user) const;
  // Position of `item` in local_items (binary search), or -1.
  int64_t item_position(uint32_t item) const;
};

LocalSubgraph expand_user(const GlobalGraph& g, uint32_t anchor,
                          uint32_t max_neighbors, EdgeScope scope);

std::vector<LocalSubgraph> expand_all_users(const GlobalGraph& g,
                                            uint32_t max_neighbors,
                                            EdgeScope scope, int threads);

// Every (i, j) with u_j in U_i but u_i not in U_j. Possible only under
// max_neighbors truncation; co-interaction itself is symmetric.
std::vector<std::pair<uint32_t, uint32_t>> expansion_symmetry_check(
    const std::vector<LocalSubgraph>& subgraphs);

// Debug dump: `anchor | expanded_users | n_edges` per line.
void write_subgraph_dump(const std::vector<LocalSubgraph>& subgraphs,
                         const std::filesystem::path& path);

}  // namespace fedgraph
