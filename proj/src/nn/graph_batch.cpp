#include <algorithm>
#include <cmath>

#include "vulpath/error.hpp"
#include "vulpath/nn/graph_batch.hpp"

namespace vulpath::nn {
namespace {

std::vector<Eigen::Triplet<double>> normalized_triplets(const frontend::CodePropertyGraph& cpg) {
  const std::size_t n = cpg.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) adj[i].push_back(i);
  for (const auto& e : cpg.edges) {
    const std::size_t a = cpg.index_of(e.src), b = cpg.index_of(e.dst);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    adj[i].erase(std::unique(adj[i].begin(), adj[i].end()), adj[i].end());
    inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(adj[i].size()));
  }
  std::vector<Eigen::Triplet<double>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : adj[i])
      out.emplace_back(static_cast<int>(i), static_cast<int>(j), inv_sqrt_deg[i] * inv_sqrt_deg[j]);
  return out;
}

}  // namespace

Matrix normalized_adjacency(const frontend::CodePropertyGraph& cpg) {
  const auto n = static_cast<Eigen::Index>(cpg.size());
  Matrix s = Matrix::Zero(n, n);
  for (const auto& t : normalized_triplets(cpg)) s(t.row(), t.col()) = t.value();
  return s;
}

SparseMatrix normalized_adjacency_sparse(const frontend::CodePropertyGraph& cpg) {
  const auto n = static_cast<Eigen::Index>(cpg.size());
  SparseMatrix s(n, n);
  const auto triplets = normalized_triplets(cpg);
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

GraphSample make_sample(const frontend::CodePropertyGraph& cpg, Matrix features, std::vector<int> node_labels,
                        int graph_label) {
  if (features.rows() != static_cast<Eigen::Index>(cpg.size()))
    throw ShapeMismatch("feature rows " + std::to_string(features.rows()) + " != node count " +
                        std::to_string(cpg.size()));
  if (node_labels.empty()) node_labels.assign(cpg.size(), -1);
  if (node_labels.size() != cpg.size()) throw ShapeMismatch("label count differs from node count");
  GraphSample s;
  s.adjacency = normalized_adjacency_sparse(cpg);
  s.features = std::move(features);
  s.node_labels = std::move(node_labels);
  for (std::size_t i = 0; i < cpg.size(); ++i)
    if (cpg.nodes[i].is_statement) s.statement_rows.push_back(static_cast<int>(i));
  s.graph_label = graph_label;
  return s;
}

GraphBatch make_batch(const std::vector<const GraphSample*>& samples) {
  Eigen::Index rows = 0, cols = 0, nnz = 0;
  for (const auto* s : samples) {
    rows += s->features.rows();
    nnz += s->adjacency.nonZeros();
    if (cols == 0) cols = s->features.cols();
    if (s->features.cols() != cols) throw ShapeMismatch("feature widths differ within a batch");
  }
  GraphBatch b;
  b.features.resize(rows, cols);
  b.adjacency.resize(rows, rows);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  Eigen::Index offset = 0;
  for (const auto* s : samples) {
    const Eigen::Index n = s->features.rows();
    b.features.middleRows(offset, n) = s->features;
    for (Eigen::Index r = 0; r < s->adjacency.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(s->adjacency, r); it; ++it)
        triplets.emplace_back(static_cast<int>(offset + it.row()), static_cast<int>(offset + it.col()), it.value());
    b.node_labels.insert(b.node_labels.end(), s->node_labels.begin(), s->node_labels.end());
    std::vector<int> stmts;
    for (int r : s->statement_rows) stmts.push_back(static_cast<int>(offset) + r);
    b.statement_rows.push_back(std::move(stmts));
    b.graph_labels.push_back(s->graph_label);
    offset += n;
  }
  b.adjacency.setFromTriplets(triplets.begin(), triplets.end());
  return b;
}

}  // namespace vulpath::nn
