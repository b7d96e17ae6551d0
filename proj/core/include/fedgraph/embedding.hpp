#pragma once

#include <Eigen/Dense>

#include "fedgraph/rng.hpp"

namespace fedgraph {

// Dense entity-by-dimension matrix. Row-major so per-row reads and writes
// (the dominant access pattern) touch contiguous memory.
using EmbeddingMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline EmbeddingMatrix init_embeddings(Eigen::Index rows, Eigen::Index dim,
                                       Rng& rng, double stddev = 0.1) {
  EmbeddingMatrix m(rows, dim);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      m(r, c) = rng.normal(0.0, stddev);
    }
  }
  return m;
}

inline bool all_finite(const EmbeddingMatrix& m) {
  return m.allFinite();
}

}  // namespace fedgraph
