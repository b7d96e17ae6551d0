#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fedgraph/embedding.hpp"
#include "fedgraph/graph.hpp"

namespace fedgraph {

// Local training hyperparameters (lambda in the round loop).
struct LocalHyperparams {
  int embedding_dim = 64;
  int layers = 2;          // L message-passing layers
  int local_epochs = 20;
  int batch_size = 512;
  double learning_rate = 0.05;
  double reg = 1e-4;       // L2 on layer-0 embeddings
  double momentum = 0.0;   // plain SGD when 0
  uint64_t rng_seed = 0;   // negative sampling / shuffling seed
};

// Embedding slices aligned to the subgraph's ordered sets: row i of user_emb
// is expanded_users[i], row j of item_emb is local_items[j].
struct LocalModelState {
  EmbeddingMatrix user_emb;
  EmbeddingMatrix item_emb;
  int layers = 2;
  // SGD momentum buffers, allocated lazily when momentum > 0.
  EmbeddingMatrix user_vel;
  EmbeddingMatrix item_vel;
};

// One BPR training example, all in local (subgraph) positions.
struct BprExample {
  uint32_t user;
  uint32_t pos_item;
  uint32_t neg_item;
};

// LightGCN propagation over the local bipartite graph: layer-wise neighbor
// averaging with symmetric 1/sqrt(d_u d_v) normalization, final embedding =
// mean of layers 0..L. Nodes with no local edges keep their layer-0
// embedding in every layer's contribution.
std::pair<EmbeddingMatrix, EmbeddingMatrix> lightgcn_propagate(
    const LocalModelState& state, const LocalSubgraph& sub);

struct BprGradients {
  EmbeddingMatrix user_grad;
  EmbeddingMatrix item_grad;
  double loss = 0.0;
};

// Batch objective: mean over examples of
//   -ln sigmoid(score(u,pos) - score(u,neg)) + reg/2 * (|e0_u|^2 + |e0_p|^2 + |e0_n|^2)
// with score = dot product of propagated embeddings and the regularizer on
// layer-0 rows. Gradients are with respect to the layer-0 parameters.
BprGradients bpr_gradients(const LocalModelState& state,
                           const LocalSubgraph& sub,
                           std::span<const BprExample> batch, double reg);

// One optimizer step over the batch. Returns the batch loss; empty batch is
// a no-op with loss 0.
double bpr_step(LocalModelState& state, const LocalSubgraph& sub,
                std::span<const BprExample> batch, double lr, double reg,
                double momentum = 0.0);

// Sparse set of embedding rows keyed by strictly ascending global indices.
struct RowSet {
  std::vector<uint32_t> keys;
  EmbeddingMatrix rows;

  std::optional<Eigen::Index> position(uint32_t key) const;
};

// A client's post-training payload: updated rows for its expanded users and
// local items, plus the edge counts FedAvg-style weighting needs.
struct ClientUpdate {
  uint32_t client = 0;
  RowSet user_rows;
  RowSet item_rows;
  uint64_t train_edge_count = 0;            // n_k
  std::vector<uint32_t> item_edge_counts;   // parallel to item_rows.keys
  double train_loss = 0.0;                  // mean batch loss, last epoch
};

// ClientUpdate(E_u, E_v, lambda): copies the client's rows out of the global
// matrices, trains locally for lambda.local_epochs BPR epochs, and returns
// the updated rows. The global matrices are never written. Negatives are
// sampled uniformly from the client's local items, excluding the example
// user's local positives (falling back to any local item when every item is
// a positive).
ClientUpdate client_update(const EmbeddingMatrix& global_user,
                           const EmbeddingMatrix& global_item,
                           const LocalSubgraph& sub,
                           const LocalHyperparams& params);

}  // namespace fedgraph
