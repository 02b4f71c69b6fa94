#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "vulpath/frontend/cpg.hpp"

namespace vulpath::nn {

using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// D^-1/2 (A + I) D^-1/2 where A is the symmetrized union of every edge kind.
Matrix normalized_adjacency(const frontend::CodePropertyGraph& cpg);
SparseMatrix normalized_adjacency_sparse(const frontend::CodePropertyGraph& cpg);

/// One graph ready for the models. Row order follows `cpg.nodes`.
struct GraphSample {
  SparseMatrix adjacency;
  Matrix features;
  std::vector<int> node_labels;     // 1 sink, 0 non-sink, -1 unlabeled
  std::vector<int> statement_rows;  // rows pooled by the detector
  int graph_label = 0;
};

GraphSample make_sample(const frontend::CodePropertyGraph& cpg, Matrix features, std::vector<int> node_labels = {},
                        int graph_label = 0);

/// Disjoint union of samples with a block-diagonal adjacency.
struct GraphBatch {
  SparseMatrix adjacency;
  Matrix features;
  std::vector<int> node_labels;
  std::vector<std::vector<int>> statement_rows;  // per graph, batch row indices
  std::vector<int> graph_labels;

  std::size_t graphs() const { return graph_labels.size(); }
};

GraphBatch make_batch(const std::vector<const GraphSample*>& samples);

}  // namespace vulpath::nn
