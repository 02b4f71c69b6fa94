#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "vulpath/baselines/edge_mask.hpp"
#include "vulpath/error.hpp"
#include "vulpath/nn/adam.hpp"

namespace vulpath::baselines {

using frontend::CodePropertyGraph;
using frontend::EdgeKind;
using nn::Matrix;

namespace {

struct MaskLayout {
  std::vector<frontend::CpgEdge> edges;                     // masked edges
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pair;  // row/col of each, row <= col
  Matrix fixed;                                             // structural adjacency incl. self loops
};

MaskLayout layout(const CodePropertyGraph& cpg) {
  const auto n = static_cast<Eigen::Index>(cpg.size());
  MaskLayout l;
  l.fixed = Matrix::Identity(n, n);
  for (const auto& e : cpg.edges) {
    auto a = static_cast<Eigen::Index>(cpg.index_of(e.src)), b = static_cast<Eigen::Index>(cpg.index_of(e.dst));
    if (e.kind == EdgeKind::DDG || e.kind == EdgeKind::CDG) {
      l.edges.push_back(e);
      l.pair.emplace_back(std::min(a, b), std::max(a, b));
    } else {
      l.fixed(a, b) = l.fixed(b, a) = 1.0;
    }
  }
  return l;
}

Matrix soft_adjacency(const MaskLayout& l, const std::vector<double>& mask) {
  Matrix keep_off = Matrix::Ones(l.fixed.rows(), l.fixed.cols());  // prod(1 - m)
  for (std::size_t e = 0; e < l.edges.size(); ++e) keep_off(l.pair[e].first, l.pair[e].second) *= 1.0 - mask[e];
  Matrix a = l.fixed;
  for (std::size_t e = 0; e < l.edges.size(); ++e) {
    const auto [r, c] = l.pair[e];
    if (l.fixed(r, c) == 0.0) a(r, c) = a(c, r) = 1.0 - keep_off(r, c);
  }
  return a;
}

Matrix normalize(const Matrix& a, Eigen::VectorXd& inv_sqrt_deg) {
  inv_sqrt_deg = a.rowwise().sum().array().rsqrt();
  return inv_sqrt_deg.asDiagonal() * a * inv_sqrt_deg.asDiagonal();
}

nn::GraphBatch single_batch(const CodePropertyGraph& cpg, const Matrix& s, const Matrix& features) {
  nn::GraphBatch b;
  b.adjacency = s.sparseView(0.0, 0.0);
  b.features = features;
  b.node_labels.assign(cpg.size(), -1);
  std::vector<int> rows;
  for (std::size_t i = 0; i < cpg.size(); ++i)
    if (cpg.nodes[i].is_statement) rows.push_back(static_cast<int>(i));
  b.statement_rows.push_back(std::move(rows));
  b.graph_labels.push_back(0);
  return b;
}

}  // namespace

Matrix masked_adjacency(const CodePropertyGraph& cpg, const std::vector<double>& mask) {
  const MaskLayout l = layout(cpg);
  if (mask.size() != l.edges.size()) throw ShapeMismatch("mask length differs from dependence edge count");
  return soft_adjacency(l, mask);
}

MaskObjective edge_mask_objective(const CodePropertyGraph& cpg, const Matrix& features,
                                  const nn::DetectorModel& detector, const std::vector<double>& mask, double target,
                                  double lambda) {
  const MaskLayout l = layout(cpg);
  const std::size_t m = l.edges.size();
  if (mask.size() != m) throw ShapeMismatch("mask length differs from dependence edge count");
  const Matrix a = soft_adjacency(l, mask);
  Eigen::VectorXd r;
  const Matrix s = normalize(a, r);
  const nn::GraphBatch batch = single_batch(cpg, s, features);
  nn::DetectorForwardCache cache;
  const double logit = nn::detector_logits(detector, batch, &cache)(0);
  MaskObjective out;
  out.probability = nn::sigmoid(logit);
  out.loss = std::max(logit, 0.0) + std::log1p(std::exp(-std::abs(logit))) - target * logit;
  for (double v : mask) out.loss += lambda * v;
  Matrix ds;
  nn::detector_backward(detector, batch, cache, Eigen::VectorXd::Constant(1, out.probability - target), &ds);

  // Through S = D^-1/2 A D^-1/2 with D = diag(rowsum A).
  const Eigen::VectorXd dr =
      (ds.array() * a.array()).matrix() * r + (ds.transpose().array() * a.array()).matrix() * r;
  const Eigen::VectorXd dd = dr.array() * (-0.5) * r.array().cube();
  Matrix da = r.asDiagonal() * ds * r.asDiagonal();
  da.colwise() += dd;

  out.gradient.assign(m, lambda);
  for (std::size_t e = 0; e < m; ++e) {
    const auto [rr, cc] = l.pair[e];
    if (l.fixed(rr, cc) != 0.0) continue;
    double others = 1;
    for (std::size_t f = 0; f < m; ++f)
      if (f != e && l.pair[f] == l.pair[e]) others *= 1.0 - mask[f];
    out.gradient[e] += (da(rr, cc) + da(cc, rr)) * others;
  }
  return out;
}

EdgeMaskResult edge_mask_explain(const CodePropertyGraph& cpg, const Matrix& features,
                                 const nn::DetectorModel& detector, const EdgeMaskConfig& config) {
  const MaskLayout l = layout(cpg);
  const std::size_t m = l.edges.size();
  EdgeMaskResult result;
  result.original_probability = nn::detector_forward(cpg, features, detector);
  const double target = result.original_probability;

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix mask(static_cast<Eigen::Index>(m), 1);
  for (std::size_t e = 0; e < m; ++e) mask(static_cast<Eigen::Index>(e), 0) = 1.0 - 0.1 * u(rng);

  nn::AdamState adam;
  adam.lr = config.lr;
  std::vector<double> mv(m);
  auto sync = [&] {
    for (std::size_t e = 0; e < m; ++e) mv[e] = mask(static_cast<Eigen::Index>(e), 0);
  };
  for (int step = 0; step < config.steps && m > 0; ++step) {
    sync();
    const MaskObjective obj = edge_mask_objective(cpg, features, detector, mv, target, config.lambda);
    const Matrix grad = Eigen::Map<const Matrix>(obj.gradient.data(), static_cast<Eigen::Index>(m), 1);
    adam_step({&mask}, {grad}, adam);
    mask = mask.cwiseMax(0.0).cwiseMin(1.0);
  }
  sync();
  result.masked_probability =
      m > 0 ? edge_mask_objective(cpg, features, detector, mv, target, config.lambda).probability : target;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return mv[x] > mv[y]; });
  for (std::size_t e : order) result.edges.push_back({l.edges[e], mv[e]});
  const auto k = static_cast<std::size_t>(std::max(config.top_k, 0));
  for (std::size_t i = 0; i < order.size() && i < k && result.lines.size() < k; ++i) {
    const auto& e = l.edges[order[i]];
    for (int id : {e.src, e.dst}) {
      if (result.lines.size() >= k) break;
      const auto& node = cpg.node(id);
      if (node.line > 0) result.lines.insert(node.line);
    }
  }
  return result;
}

}  // namespace vulpath::baselines
