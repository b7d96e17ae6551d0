#include "fedgraph/graph.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

namespace fedgraph {

EdgeScope parse_edge_scope(std::string_view id) {
  if (id == "anchor-only") return EdgeScope::kAnchorOnly;
  if (id == "all-local") return EdgeScope::kAllLocal;
  throw std::invalid_argument(fmt::format("unknown edge scope '{}'", id));
}

std::string_view edge_scope_id(EdgeScope scope) {
  return scope == EdgeScope::kAnchorOnly ? "anchor-only" : "all-local";
}

GlobalGraph build_global_graph(const InteractionDataset& ds) {
  if (ds.n_edges() == 0) {
    throw std::invalid_argument("cannot build a graph from an empty dataset");
  }
  GlobalGraph g;
  g.user_items.resize(ds.n_users());
  g.item_users.resize(ds.n_items());
  for (size_t e = 0; e < ds.edges.size(); ++e) {
    if (ds.partitions[e] != Partition::kTrain) continue;
    g.user_items[ds.edges[e].user].push_back(ds.edges[e].item);
    g.item_users[ds.edges[e].item].push_back(ds.edges[e].user);
  }
  for (auto& v : g.user_items) std::sort(v.begin(), v.end());
  for (auto& v : g.item_users) std::sort(v.begin(), v.end());
  return g;
}

bool LocalSubgraph::contains_user(uint32_t user) const {
  return user_position(user) >= 0;
}

int64_t LocalSubgraph::user_position(uint32_t user) const {
  for (size_t i = 0; i < expanded_users.size(); ++i) {
    if (expanded_users[i] == user) return static_cast<int64_t>(i);
  }
  return -1;
}

int64_t LocalSubgraph::item_position(uint32_t item) const {
  auto it = std::lower_bound(local_items.begin(), local_items.end(), item);
  if (it == local_items.end() || *it != item) return -1;
  return it - local_items.begin();
}

LocalSubgraph expand_user(const GlobalGraph& g, uint32_t anchor,
                          uint32_t max_neighbors, EdgeScope scope) {
  if (anchor >= g.n_users()) {
    throw std::out_of_range(fmt::format("anchor {} out of range", anchor));
  }
  LocalSubgraph sub;
  sub.anchor = anchor;

  // Shared-item counts with every co-interacting user.
  std::unordered_map<uint32_t, uint32_t> shared;
  for (uint32_t item : g.user_items[anchor]) {
    for (uint32_t other : g.item_users[item]) {
      if (other != anchor) ++shared[other];
    }
  }
  std::vector<std::pair<uint32_t, uint32_t>> ranked(shared.begin(), shared.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > max_neighbors) ranked.resize(max_neighbors);

  sub.expanded_users.reserve(ranked.size() + 1);
  sub.expanded_users.push_back(anchor);
  for (const auto& [user, count] : ranked) sub.expanded_users.push_back(user);

  if (scope == EdgeScope::kAnchorOnly) {
    sub.local_items = g.user_items[anchor];
  } else {
    std::vector<uint32_t> items;
    for (uint32_t user : sub.expanded_users) {
      items.insert(items.end(), g.user_items[user].begin(), g.user_items[user].end());
    }
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    sub.local_items = std::move(items);
  }

  for (uint32_t user : sub.expanded_users) {
    if (scope == EdgeScope::kAnchorOnly) {
      // Only edges into the anchor's item set.
      std::vector<uint32_t> isect;
      std::set_intersection(g.user_items[user].begin(), g.user_items[user].end(),
                            sub.local_items.begin(), sub.local_items.end(),
                            std::back_inserter(isect));
      for (uint32_t item : isect) sub.local_edges.push_back({user, item});
    } else {
      // all-local: every expanded user's item set is inside local_items.
      for (uint32_t item : g.user_items[user]) sub.local_edges.push_back({user, item});
    }
  }
  return sub;
}

std::vector<LocalSubgraph> expand_all_users(const GlobalGraph& g,
                                            uint32_t max_neighbors,
                                            EdgeScope scope, int threads) {
  const uint32_t n = g.n_users();
  std::vector<LocalSubgraph> subs(n);
  threads = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      for (uint32_t u = t; u < n; u += threads) {
        subs[u] = expand_user(g, u, max_neighbors, scope);
      }
    });
  }
  for (auto& w : workers) w.join();
  return subs;
}

std::vector<std::pair<uint32_t, uint32_t>> expansion_symmetry_check(
    const std::vector<LocalSubgraph>& subgraphs) {
  std::unordered_map<uint32_t, size_t> by_anchor;
  for (size_t i = 0; i < subgraphs.size(); ++i) {
    by_anchor[subgraphs[i].anchor] = i;
  }
  std::vector<std::pair<uint32_t, uint32_t>> asymmetric;
  for (const auto& sub : subgraphs) {
    for (uint32_t other : sub.expanded_users) {
      if (other == sub.anchor) continue;
      auto it = by_anchor.find(other);
      if (it == by_anchor.end()) continue;
      if (!subgraphs[it->second].contains_user(sub.anchor)) {
        asymmetric.emplace_back(sub.anchor, other);
      }
    }
  }
  std::sort(asymmetric.begin(), asymmetric.end());
  return asymmetric;
}

void write_subgraph_dump(const std::vector<LocalSubgraph>& subgraphs,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(fmt::format("cannot write subgraph dump '{}'", path.string()));
  }
  for (const auto& sub : subgraphs) {
    out << sub.anchor << " |";
    for (uint32_t u : sub.expanded_users) out << ' ' << u;
    out << " | " << sub.local_edges.size() << '\n';
  }
}

}  // namespace fedgraph
