#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedgraph/aggregation.hpp"
#include "fedgraph/dataset.hpp"
#include "fedgraph/graph.hpp"
#include "fedgraph/local_trainer.hpp"
#include "fedgraph/metrics.hpp"

namespace fedgraph {

// Full configuration of one federated run.
struct RunConfig {
  int rounds = 100;
  int clients_per_round = 20;
  int patience = 5;          // evaluations without improvement before stopping
  uint64_t seed = 42;
  int eval_every = 1;
  int eval_k = 10;
  uint32_t max_neighbors = 32;
  EdgeScope edge_scope = EdgeScope::kAllLocal;
  LocalHyperparams local;
  AggregationConfig agg;

  void validate() const;
};

struct RoundState {
  int round = 0;  // 1-based; 0 is the initial state
  std::vector<uint32_t> selected;
  EmbeddingMatrix user_matrix;
  EmbeddingMatrix item_matrix;
  double mean_local_loss = 0.0;
  double alpha_used = 0.0;
};

struct RoundRecord {
  int round = 0;
  double alpha = 0.0;
  std::vector<uint32_t> selected;
  double mean_local_loss = 0.0;
  bool evaluated = false;
  double valid_ndcg = 0.0;
  double valid_hr = 0.0;
};

struct RunReport {
  std::vector<RoundRecord> rounds;
  int best_round = 0;
  double best_valid_ndcg = 0.0;
  MetricReport test_ndcg;
  MetricReport test_hr;
  EmbeddingMatrix best_user_matrix;  // matrices at the best validation round
  EmbeddingMatrix best_item_matrix;
};

// min(k, n) distinct client indices, uniform without replacement from a
// generator seeded by (seed, round), sorted ascending.
std::vector<uint32_t> select_clients(uint32_t n, uint32_t k, uint64_t seed,
                                     int round);

// One synchronous round: select clients, run every client update against an
// immutable snapshot of the round r-1 matrices, then aggregate users and
// items. Client updates run in parallel up to `threads`.
RoundState run_round(const RoundState& prev,
                     std::span<const LocalSubgraph> subgraphs,
                     const Membership& membership, const RunConfig& cfg,
                     int threads);

// The central-server loop: expansion, seeded initialization, rounds with
// validation-based early stopping, and test evaluation at the best round.
RunReport run_experiment(const InteractionDataset& ds, const RunConfig& cfg);

// Thread budget: FEDGRAPH_THREADS when set, else hardware concurrency.
int thread_budget();

}  // namespace fedgraph
