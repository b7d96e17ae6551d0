#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fedgraph/embedding.hpp"
#include "fedgraph/local_trainer.hpp"

namespace fedgraph {

enum class AlphaMode { kFixed, kArithmetic, kGeometric };

AlphaMode parse_alpha_mode(std::string_view id);
std::string_view alpha_mode_id(AlphaMode mode);

enum class Strategy { kDistFedAvg, kFedAvg, kSimpleAvg, kFedMedian, kFedAtt };

// Ids as used in configs and on the CLI: dist-fedavg, fedavg, simpleavg,
// fedmedian, fedatt.
Strategy parse_strategy(std::string_view id);
std::string_view strategy_id(Strategy strategy);

// Aggregation hyperparameters (theta in the round loop).
struct AggregationConfig {
  double p = 2.0;                  // Minkowski order, p >= 1
  AlphaMode alpha_mode = AlphaMode::kFixed;
  double alpha = 0.5;              // used when alpha_mode == kFixed
  double alpha0 = 1.0;             // initial alpha for decay modes
  double alpha_threshold = 0.2;    // lower bound alpha_T
  double gamma = 0.1;              // decay rate
  int z = 10;                      // rounds per decay step
  int warmup_rounds = 0;           // alpha forced to 1 while r <= warmup
  double distance_floor = 1e-8;    // epsilon floor before inversion
  double fedatt_temperature = 1.0;
  Strategy user_strategy = Strategy::kDistFedAvg;
  Strategy item_strategy = Strategy::kFedAvg;

  // Throws std::invalid_argument when an invariant is violated
  // (0 <= alpha_T <= alpha0 <= 1, p >= 1, gamma >= 0, z >= 1, eps > 0, ...).
  void validate() const;
};

// Client i -> its expanded user set U_i (sorted ascending).
using Membership = std::vector<std::vector<uint32_t>>;

// (sum_k |a_k - b_k|^p)^(1/p).
double minkowski_distance(const Eigen::RowVectorXd& a,
                          const Eigen::RowVectorXd& b, double p);
double minkowski_distance(EmbeddingMatrix::ConstRowXpr a,
                          EmbeddingMatrix::ConstRowXpr b, double p);

// Full inverse-distance weight matrix with per-row normalizers:
//   W_ij = 1 / max(D_ij, eps)  when i != j and u_j in U_i, else 0
//   row_sum_i = sum_j W_ij
// Distances are taken between rows of the previous round's global user
// matrix. Quadratic in the user count; the round loop never materializes
// this, it is the reference form used by tools and tests.
struct WeightMatrix {
  Eigen::MatrixXd w;
  Eigen::VectorXd row_sum;
};

WeightMatrix build_weights(const EmbeddingMatrix& prev_global,
                           const Membership& membership, double p, double eps);

// Interpolation weight for round r (1-based):
//   r <= warmup_rounds          -> 1
//   fixed                       -> alpha
//   arithmetic                  -> max(alpha_T, alpha0 - gamma * floor(r/z))
//   geometric                   -> max(alpha_T, alpha0 ^ (gamma * floor(r/z)))
double alpha_schedule(const AggregationConfig& cfg, int round);

// Dist-FedAvg over user embeddings. Per user i:
//   J_i  = selected clients j != i whose update carries a row for i
//   W_ij = inverse Minkowski distance between prev rows i and j, floored
//   e'_i = sum_{j in J_i} W_ij * row_{j,i} / sum_{j in J_i} W_ij
// then the anchor interpolation:
//   i selected, J_i nonempty  -> alpha * own_row + (1 - alpha) * e'_i
//   i selected, J_i empty     -> own_row
//   i unselected, J_i nonempty-> e'_i
//   i unselected, J_i empty   -> previous round's row (carry-forward)
// Both the contributor sum and its normalizer are restricted to J_i, so the
// result is a convex combination of contributed rows.
EmbeddingMatrix dist_fedavg_user(std::span<const ClientUpdate> updates,
                                 const EmbeddingMatrix& prev_global,
                                 const Membership& membership,
                                 const std::vector<uint32_t>& selected,
                                 int round, const AggregationConfig& cfg);

// Per-row weighted mean with weights n_k / sum n_k over contributing
// clients; rows nobody contributed carry forward.
EmbeddingMatrix fedavg_user(std::span<const ClientUpdate> updates,
                            const EmbeddingMatrix& prev_global);

// Unweighted mean over contributing clients.
EmbeddingMatrix simple_avg_user(std::span<const ClientUpdate> updates,
                                const EmbeddingMatrix& prev_global);

// Coordinate-wise median over contributing clients; even counts take the
// midpoint of the two middle values.
EmbeddingMatrix fed_median_user(std::span<const ClientUpdate> updates,
                                const EmbeddingMatrix& prev_global);

// Attentive weighting: per row, softmax over contributors of
// -|row_j - prev_i|_2 / temperature.
EmbeddingMatrix fed_att_user(std::span<const ClientUpdate> updates,
                             const EmbeddingMatrix& prev_global,
                             double temperature);

// Strategy dispatch for the round loop.
EmbeddingMatrix aggregate_users(std::span<const ClientUpdate> updates,
                                const EmbeddingMatrix& prev_global,
                                const Membership& membership,
                                const std::vector<uint32_t>& selected,
                                int round, const AggregationConfig& cfg);

// Item-side aggregation. Contributors for an item are the clients whose
// local_items contain it; the fedavg weight is the client's local train-edge
// count for that item. dist-fedavg is user-only and rejected here.
EmbeddingMatrix aggregate_items(std::span<const ClientUpdate> updates,
                                const EmbeddingMatrix& prev_items,
                                Strategy strategy,
                                const AggregationConfig& cfg);

}  // namespace fedgraph
