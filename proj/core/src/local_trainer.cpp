#include "fedgraph/local_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "fedgraph/rng.hpp"

namespace fedgraph {

namespace {

// Local-position edge list with precomputed 1/sqrt(d_u d_v) coefficients.
struct LocalAdjacency {
  std::vector<uint32_t> edge_user;
  std::vector<uint32_t> edge_item;
  std::vector<double> norm;
  std::vector<uint8_t> user_isolated;
  std::vector<uint8_t> item_isolated;
};

LocalAdjacency build_adjacency(const LocalSubgraph& sub) {
  LocalAdjacency adj;
  const size_t n_users = sub.expanded_users.size();
  const size_t n_items = sub.local_items.size();

  std::unordered_map<uint32_t, uint32_t> user_pos;
  user_pos.reserve(n_users);
  for (uint32_t i = 0; i < n_users; ++i) user_pos[sub.expanded_users[i]] = i;

  std::vector<uint32_t> du(n_users, 0), dv(n_items, 0);
  adj.edge_user.reserve(sub.local_edges.size());
  adj.edge_item.reserve(sub.local_edges.size());
  for (const Edge& e : sub.local_edges) {
    auto uit = user_pos.find(e.user);
    int64_t ip = sub.item_position(e.item);
    if (uit == user_pos.end() || ip < 0) {
      throw std::logic_error("local edge references a node outside the subgraph");
    }
    adj.edge_user.push_back(uit->second);
    adj.edge_item.push_back(static_cast<uint32_t>(ip));
    ++du[uit->second];
    ++dv[static_cast<uint32_t>(ip)];
  }
  adj.norm.resize(adj.edge_user.size());
  for (size_t e = 0; e < adj.norm.size(); ++e) {
    adj.norm[e] = 1.0 / std::sqrt(static_cast<double>(du[adj.edge_user[e]]) *
                                  static_cast<double>(dv[adj.edge_item[e]]));
  }
  adj.user_isolated.resize(n_users);
  adj.item_isolated.resize(n_items);
  for (size_t i = 0; i < n_users; ++i) adj.user_isolated[i] = du[i] == 0;
  for (size_t j = 0; j < n_items; ++j) adj.item_isolated[j] = dv[j] == 0;
  return adj;
}

// Mean over layers 0..L of the symmetric-normalized neighbor averaging.
// Isolated nodes carry their current embedding through each layer, which
// keeps the operator symmetric, so this same routine backpropagates
// gradients from final to layer-0 embeddings.
void propagate(const LocalAdjacency& adj, const EmbeddingMatrix& user0,
               const EmbeddingMatrix& item0, int layers,
               EmbeddingMatrix& user_out, EmbeddingMatrix& item_out) {
  EmbeddingMatrix ucur = user0, icur = item0;
  user_out = user0;
  item_out = item0;
  EmbeddingMatrix unext(user0.rows(), user0.cols());
  EmbeddingMatrix inext(item0.rows(), item0.cols());
  for (int l = 0; l < layers; ++l) {
    unext.setZero();
    inext.setZero();
    for (size_t e = 0; e < adj.norm.size(); ++e) {
      const uint32_t u = adj.edge_user[e];
      const uint32_t v = adj.edge_item[e];
      unext.row(u) += adj.norm[e] * icur.row(v);
      inext.row(v) += adj.norm[e] * ucur.row(u);
    }
    for (Eigen::Index i = 0; i < unext.rows(); ++i) {
      if (adj.user_isolated[i]) unext.row(i) = ucur.row(i);
    }
    for (Eigen::Index j = 0; j < inext.rows(); ++j) {
      if (adj.item_isolated[j]) inext.row(j) = icur.row(j);
    }
    ucur.swap(unext);
    icur.swap(inext);
    user_out += ucur;
    item_out += icur;
  }
  user_out /= static_cast<double>(layers + 1);
  item_out /= static_cast<double>(layers + 1);
}

// -ln sigmoid(x), safe for large |x|.
double softplus_neg(double x) {
  return std::max(0.0, -x) + std::log1p(std::exp(-std::abs(x)));
}

BprGradients gradients_impl(const LocalAdjacency& adj,
                            const LocalModelState& state,
                            std::span<const BprExample> batch, double reg) {
  BprGradients out;
  out.user_grad = EmbeddingMatrix::Zero(state.user_emb.rows(), state.user_emb.cols());
  out.item_grad = EmbeddingMatrix::Zero(state.item_emb.rows(), state.item_emb.cols());
  if (batch.empty()) return out;

  EmbeddingMatrix fu, fi;
  propagate(adj, state.user_emb, state.item_emb, state.layers, fu, fi);

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  EmbeddingMatrix gfu = EmbeddingMatrix::Zero(fu.rows(), fu.cols());
  EmbeddingMatrix gfi = EmbeddingMatrix::Zero(fi.rows(), fi.cols());
  double loss = 0.0;
  for (const BprExample& ex : batch) {
    const auto u = fu.row(ex.user);
    const auto p = fi.row(ex.pos_item);
    const auto n = fi.row(ex.neg_item);
    const double diff = u.dot(p) - u.dot(n);
    loss += softplus_neg(diff);
    // d(-ln sigmoid(diff))/d(diff) = sigmoid(diff) - 1
    const double g = (1.0 / (1.0 + std::exp(-diff)) - 1.0) * inv_b;
    gfu.row(ex.user) += g * (p - n);
    gfi.row(ex.pos_item) += g * u;
    gfi.row(ex.neg_item) -= g * u;
  }

  // The propagation operator is symmetric, so it maps final-embedding
  // gradients back onto layer-0 gradients.
  propagate(adj, gfu, gfi, state.layers, out.user_grad, out.item_grad);

  if (reg != 0.0) {
    for (const BprExample& ex : batch) {
      loss += 0.5 * reg *
              (state.user_emb.row(ex.user).squaredNorm() +
               state.item_emb.row(ex.pos_item).squaredNorm() +
               state.item_emb.row(ex.neg_item).squaredNorm());
      out.user_grad.row(ex.user) += reg * inv_b * state.user_emb.row(ex.user);
      out.item_grad.row(ex.pos_item) += reg * inv_b * state.item_emb.row(ex.pos_item);
      out.item_grad.row(ex.neg_item) += reg * inv_b * state.item_emb.row(ex.neg_item);
    }
  }
  out.loss = loss * inv_b;
  return out;
}

}  // namespace

std::pair<EmbeddingMatrix, EmbeddingMatrix> lightgcn_propagate(
    const LocalModelState& state, const LocalSubgraph& sub) {
  if (state.layers < 0) throw std::invalid_argument("layer count must be >= 0");
  const LocalAdjacency adj = build_adjacency(sub);
  EmbeddingMatrix u, v;
  propagate(adj, state.user_emb, state.item_emb, state.layers, u, v);
  return {std::move(u), std::move(v)};
}

BprGradients bpr_gradients(const LocalModelState& state,
                           const LocalSubgraph& sub,
                           std::span<const BprExample> batch, double reg) {
  return gradients_impl(build_adjacency(sub), state, batch, reg);
}

double bpr_step(LocalModelState& state, const LocalSubgraph& sub,
                std::span<const BprExample> batch, double lr, double reg,
                double momentum) {
  if (batch.empty()) return 0.0;
  BprGradients g = bpr_gradients(state, sub, batch, reg);
  if (momentum > 0.0) {
    if (state.user_vel.size() == 0) {
      state.user_vel = EmbeddingMatrix::Zero(state.user_emb.rows(), state.user_emb.cols());
      state.item_vel = EmbeddingMatrix::Zero(state.item_emb.rows(), state.item_emb.cols());
    }
    state.user_vel = momentum * state.user_vel + g.user_grad;
    state.item_vel = momentum * state.item_vel + g.item_grad;
    state.user_emb -= lr * state.user_vel;
    state.item_emb -= lr * state.item_vel;
  } else {
    state.user_emb -= lr * g.user_grad;
    state.item_emb -= lr * g.item_grad;
  }
  return g.loss;
}

std::optional<Eigen::Index> RowSet::position(uint32_t key) const {
  auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return std::nullopt;
  return static_cast<Eigen::Index>(it - keys.begin());
}

namespace {

// Sorted copy of the subgraph's user set with rows gathered from a source
// matrix; aggregation wants ascending keys.
RowSet gather_rows(const std::vector<uint32_t>& keys_in_order,
                   const EmbeddingMatrix& source) {
  RowSet set;
  set.keys = keys_in_order;
  std::sort(set.keys.begin(), set.keys.end());
  set.rows.resize(static_cast<Eigen::Index>(set.keys.size()), source.cols());
  for (size_t i = 0; i < set.keys.size(); ++i) {
    set.rows.row(static_cast<Eigen::Index>(i)) = source.row(set.keys[i]);
  }
  return set;
}

}  // namespace

ClientUpdate client_update(const EmbeddingMatrix& global_user,
                           const EmbeddingMatrix& global_item,
                           const LocalSubgraph& sub,
                           const LocalHyperparams& params) {
  const size_t n_users = sub.expanded_users.size();
  const size_t n_items = sub.local_items.size();
  const Eigen::Index dim = global_user.cols();

  LocalModelState state;
  state.layers = params.layers;
  state.user_emb.resize(static_cast<Eigen::Index>(n_users), dim);
  state.item_emb.resize(static_cast<Eigen::Index>(n_items), dim);
  for (size_t i = 0; i < n_users; ++i) {
    state.user_emb.row(static_cast<Eigen::Index>(i)) = global_user.row(sub.expanded_users[i]);
  }
  for (size_t j = 0; j < n_items; ++j) {
    state.item_emb.row(static_cast<Eigen::Index>(j)) = global_item.row(sub.local_items[j]);
  }

  const LocalAdjacency adj = build_adjacency(sub);
  const size_t n_edges = adj.edge_user.size();

  // Per-user local positive sets for negative sampling.
  std::vector<std::vector<uint32_t>> positives(n_users);
  for (size_t e = 0; e < n_edges; ++e) positives[adj.edge_user[e]].push_back(adj.edge_item[e]);
  for (auto& v : positives) std::sort(v.begin(), v.end());

  double last_loss = 0.0;
  if (n_edges > 0 && params.local_epochs > 0 && n_items > 0) {
    Rng rng(params.rng_seed);
    std::vector<uint32_t> order(n_edges);
    for (size_t e = 0; e < n_edges; ++e) order[e] = static_cast<uint32_t>(e);
    const size_t batch_size = std::max(1, params.batch_size);
    std::vector<BprExample> batch;
    batch.reserve(batch_size);

    for (int epoch = 0; epoch < params.local_epochs; ++epoch) {
      rng.shuffle(order);
      double epoch_loss = 0.0;
      size_t batches = 0;
      for (size_t start = 0; start < n_edges; start += batch_size) {
        const size_t end = std::min(n_edges, start + batch_size);
        batch.clear();
        for (size_t k = start; k < end; ++k) {
          const uint32_t e = order[k];
          const uint32_t u = adj.edge_user[e];
          const auto& pos = positives[u];
          uint32_t neg;
          if (pos.size() >= n_items) {
            neg = static_cast<uint32_t>(rng.bounded(n_items));  // fallback: any item
          } else {
            do {
              neg = static_cast<uint32_t>(rng.bounded(n_items));
            } while (std::binary_search(pos.begin(), pos.end(), neg));
          }
          batch.push_back({u, adj.edge_item[e], neg});
        }
        BprGradients g = gradients_impl(adj, state, batch, params.reg);
        if (params.momentum > 0.0) {
          if (state.user_vel.size() == 0) {
            state.user_vel = EmbeddingMatrix::Zero(state.user_emb.rows(), dim);
            state.item_vel = EmbeddingMatrix::Zero(state.item_emb.rows(), dim);
          }
          state.user_vel = params.momentum * state.user_vel + g.user_grad;
          state.item_vel = params.momentum * state.item_vel + g.item_grad;
          state.user_emb -= params.learning_rate * state.user_vel;
          state.item_emb -= params.learning_rate * state.item_vel;
        } else {
          state.user_emb -= params.learning_rate * g.user_grad;
          state.item_emb -= params.learning_rate * g.item_grad;
        }
        epoch_loss += g.loss;
        ++batches;
      }
      last_loss = batches > 0 ? epoch_loss / static_cast<double>(batches) : 0.0;
    }
  }

  ClientUpdate update;
  update.client = sub.anchor;
  update.train_edge_count = n_edges;
  update.train_loss = last_loss;

  // Rows keyed by ascending global index.
  update.user_rows.keys = sub.expanded_users;
  std::sort(update.user_rows.keys.begin(), update.user_rows.keys.end());
  update.user_rows.rows.resize(static_cast<Eigen::Index>(n_users), dim);
  for (size_t i = 0; i < update.user_rows.keys.size(); ++i) {
    const int64_t pos = sub.user_position(update.user_rows.keys[i]);
    update.user_rows.rows.row(static_cast<Eigen::Index>(i)) =
        state.user_emb.row(static_cast<Eigen::Index>(pos));
  }
  update.item_rows.keys = sub.local_items;  // already ascending
  update.item_rows.rows = std::move(state.item_emb);

  update.item_edge_counts.assign(n_items, 0);
  for (size_t e = 0; e < n_edges; ++e) ++update.item_edge_counts[adj.edge_item[e]];
  return update;
}

}  // namespace fedgraph
