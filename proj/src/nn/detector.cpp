#include <algorithm>
#include <cmath>

#include "vulpath/error.hpp"
#include "vulpath/nn/models.hpp"

namespace vulpath::nn {
namespace {

GcnOptions block_options(const DetectorModel& model, std::size_t k, std::uint64_t seed) {
  GcnOptions o;
  o.dropout = model.config.dropout;
  o.seed = seed * 0x9E3779B97F4A7C15ULL + k + 1;
  return o;
}

template <typename Forward>
Eigen::VectorXd pool_and_read(const DetectorModel& model, const GraphBatch& batch, DetectorForwardCache* cache,
                              Forward&& forward) {
  if (batch.features.cols() != model.config.in_dim)
    throw ShapeMismatch("features have " + std::to_string(batch.features.cols()) + " columns, model expects " +
                        std::to_string(model.config.in_dim));
  for (const auto& rows : batch.statement_rows)
    if (rows.empty()) throw EmptyGraph("graph has no statement nodes");
  if (cache) *cache = {};
  Matrix h = batch.features;
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    GcnCache* c = nullptr;
    if (cache) {
      cache->inputs.push_back(h);
      cache->options.push_back(block_options(model, k, 0));
      c = &cache->layers.emplace_back();
    }
    h = forward(h, k, c);
  }
  Matrix pooled(static_cast<Eigen::Index>(batch.graphs()), h.cols());
  for (std::size_t g = 0; g < batch.graphs(); ++g) {
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(h.cols());
    for (int r : batch.statement_rows[g]) sum += h.row(r);
    pooled.row(static_cast<Eigen::Index>(g)) = sum / static_cast<double>(batch.statement_rows[g].size());
  }
  Eigen::VectorXd logits = pooled * model.readout_weight;
  logits.array() += model.readout_bias(0, 0);
  if (cache) cache->pooled = std::move(pooled);
  return logits;
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

DetectorModel DetectorModel::create(const DetectorConfig& config, std::uint64_t seed) {
  if (config.layers < 1) throw ShapeMismatch("detector needs at least 1 layer");
  DetectorModel m;
  m.config = config;
  int in = config.in_dim;
  for (int k = 0; k < config.layers; ++k) {
    m.layers.push_back(make_layer(in, config.hidden, true, seed + static_cast<std::uint64_t>(k)));
    in = config.hidden;
  }
  m.readout_weight = make_layer(in, 1, false, seed + static_cast<std::uint64_t>(config.layers)).weight;
  m.readout_bias = Matrix::Zero(1, 1);
  return m;
}

std::vector<NamedTensor> DetectorModel::tensors() {
  std::vector<NamedTensor> out;
  for (std::size_t k = 0; k < layers.size(); ++k) append_layer_tensors(out, "gcn" + std::to_string(k), layers[k]);
  out.push_back({"readout.weight", &readout_weight, true});
  out.push_back({"readout.bias", &readout_bias, true});
  return out;
}

std::vector<int> DetectorModel::dims() const {
  std::vector<int> d{config.in_dim};
  for (const auto& l : layers) d.push_back(static_cast<int>(l.out_dim()));
  d.push_back(1);
  return d;
}

Eigen::VectorXd detector_logits(DetectorModel& model, const GraphBatch& batch, Mode mode, std::uint64_t seed,
                                DetectorForwardCache* cache) {
  return pool_and_read(model, batch, cache, [&](const Matrix& h, std::size_t k, GcnCache* c) {
    const GcnOptions o = block_options(model, k, seed);
    if (cache) cache->options[k] = o;
    return gcn_forward(h, batch.adjacency, model.layers[k], o, mode, c);
  });
}

Eigen::VectorXd detector_logits(const DetectorModel& model, const GraphBatch& batch, DetectorForwardCache* cache) {
  return pool_and_read(model, batch, cache, [&](const Matrix& h, std::size_t k, GcnCache* c) {
    return gcn_forward(h, batch.adjacency, model.layers[k], block_options(model, k, 0), c);
  });
}

std::vector<Matrix> detector_backward(const DetectorModel& model, const GraphBatch& batch,
                                      const DetectorForwardCache& cache, const Eigen::VectorXd& dlogits,
                                      Matrix* dadjacency) {
  Matrix dreadout = cache.pooled.transpose() * dlogits;
  Matrix dbias = Matrix::Constant(1, 1, dlogits.sum());
  const Eigen::Index hidden = cache.pooled.cols();
  Matrix d = Matrix::Zero(batch.features.rows(), hidden);
  for (std::size_t g = 0; g < batch.graphs(); ++g) {
    const auto& rows = batch.statement_rows[g];
    const Eigen::RowVectorXd share = dlogits(static_cast<Eigen::Index>(g)) * model.readout_weight.col(0).transpose() /
                                     static_cast<double>(rows.size());
    for (int r : rows) d.row(r) += share;
  }
  if (dadjacency) *dadjacency = Matrix::Zero(batch.adjacency.rows(), batch.adjacency.cols());
  std::vector<GcnGrads> grads;
  for (const auto& l : model.layers) grads.push_back(zero_grads(l));
  for (std::size_t k = model.layers.size(); k-- > 0;)
    d = gcn_backward(d, batch.adjacency, model.layers[k], cache.options[k], cache.layers[k], grads[k], dadjacency,
                     &cache.inputs[k]);
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    std::vector<Matrix*> ptrs;
    append_layer_grads(ptrs, grads[k], model.layers[k]);
    for (Matrix* p : ptrs) out.push_back(std::move(*p));
  }
  out.push_back(std::move(dreadout));
  out.push_back(std::move(dbias));
  return out;
}

double detector_forward(const GraphSample& sample, const DetectorModel& model) {
  const GraphBatch batch = make_batch({&sample});
  return std::clamp(sigmoid(detector_logits(model, batch)(0)), 1e-15, 1.0 - 1e-15);
}

double detector_forward(const frontend::CodePropertyGraph& cpg, const Matrix& features, const DetectorModel& model) {
  return detector_forward(make_sample(cpg, features), model);
}

}  // namespace vulpath::nn
