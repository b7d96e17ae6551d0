#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedgraph/dataset.hpp"
#include "fedgraph/embedding.hpp"

namespace fedgraph {

struct MetricReport {
  std::string metric_id;
  double mean = 0.0;
  double ci95_halfwidth = 0.0;
  std::vector<double> per_user;
};

// All non-excluded items sorted by descending dot-product score, ties broken
// by ascending item index. exclude must be sorted ascending.
std::vector<uint32_t> rank_items_for_user(
    const Eigen::RowVectorXd& user_row, const EmbeddingMatrix& item_matrix,
    std::span<const uint32_t> exclude);

// Binary-relevance NDCG@k: DCG = sum 1/log2(rank+1) over relevant items in
// the top k, IDCG over min(|relevant|, k) ideal positions. relevant must be
// sorted ascending and nonempty.
double ndcg_at_k(std::span<const uint32_t> ranked,
                 std::span<const uint32_t> relevant, int k);

// 1 if any relevant item appears in the top k, else 0.
double hr_at_k(std::span<const uint32_t> ranked,
               std::span<const uint32_t> relevant, int k);

// Mean and normal-approximation 95% CI halfwidth (1.96 * s / sqrt(N), sample
// standard deviation). Requires at least 2 scores.
MetricReport aggregate_metric(std::string metric_id,
                              std::vector<double> per_user);

struct RankingEval {
  MetricReport ndcg;
  MetricReport hr;
};

// Full-catalog ranking evaluation of every user with a nonempty target set.
// target kValid excludes train items; kTest excludes train and valid items.
// Users without target items are skipped, not zero-scored.
RankingEval evaluate_ranking(const EmbeddingMatrix& user_matrix,
                             const EmbeddingMatrix& item_matrix,
                             const UserItemLists& lists, Partition target,
                             int k, int threads);

}  // namespace fedgraph
