#include "vulpath/error.hpp"
#include "vulpath/nn/models.hpp"

namespace vulpath::nn {
namespace {

GcnOptions block_options(const SinkModel& model, std::size_t k, std::uint64_t seed) {
  GcnOptions o;
  const bool last = k + 1 == model.layers.size();
  o.relu = !last;
  o.residual = !last && model.layers[k].in_dim() == model.layers[k].out_dim();
  o.dropout = last ? 0.0 : model.config.dropout;
  o.seed = seed * 0x9E3779B97F4A7C15ULL + k + 1;
  return o;
}

void check_shape(const SinkModel& model, const Matrix& x) {
  if (x.cols() != model.config.in_dim)
    throw ShapeMismatch("features have " + std::to_string(x.cols()) + " columns, model expects " +
                        std::to_string(model.config.in_dim));
}

}  // namespace

SinkModel SinkModel::create(const SinkModelConfig& config, std::uint64_t seed) {
  if (config.layers < 2) throw ShapeMismatch("sink model needs at least 2 layers");
  SinkModel m;
  m.config = config;
  int in = config.in_dim;
  for (int k = 0; k + 1 < config.layers; ++k) {
    m.layers.push_back(make_layer(in, config.hidden, true, seed + static_cast<std::uint64_t>(k)));
    in = config.hidden;
  }
  m.layers.push_back(make_layer(in, 2, false, seed + static_cast<std::uint64_t>(config.layers)));
  m.skip = make_layer(in, 2, false, seed + static_cast<std::uint64_t>(config.layers) + 1).weight;
  return m;
}

std::vector<NamedTensor> SinkModel::tensors() {
  std::vector<NamedTensor> out;
  for (std::size_t k = 0; k < layers.size(); ++k) append_layer_tensors(out, "gcn" + std::to_string(k), layers[k]);
  out.push_back({"skip.weight", &skip, true});
  return out;
}

std::vector<int> SinkModel::dims() const {
  std::vector<int> d{config.in_dim};
  for (const auto& l : layers) d.push_back(static_cast<int>(l.out_dim()));
  return d;
}

Matrix sink_logits(SinkModel& model, const SparseMatrix& s, const Matrix& x, Mode mode, std::uint64_t seed,
                   SinkForwardCache* cache) {
  check_shape(model, x);
  if (cache) *cache = {};
  Matrix h = x;
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    const GcnOptions o = block_options(model, k, seed);
    GcnCache* c = nullptr;
    if (cache) {
      cache->inputs.push_back(h);
      cache->options.push_back(o);
      c = &cache->layers.emplace_back();
    }
    Matrix next = gcn_forward(h, s, model.layers[k], o, mode, c);
    if (k + 1 == model.layers.size()) next += h * model.skip;
    h = std::move(next);
  }
  return h;
}

Matrix sink_logits(const SinkModel& model, const SparseMatrix& s, const Matrix& x) {
  check_shape(model, x);
  Matrix h = x;
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    Matrix next = gcn_forward(h, s, model.layers[k], block_options(model, k, 0));
    if (k + 1 == model.layers.size()) next += h * model.skip;
    h = std::move(next);
  }
  return h;
}

std::vector<Matrix> sink_backward(SinkModel& model, const SparseMatrix& s, const SinkForwardCache& cache,
                                  const Matrix& dlogits) {
  std::vector<GcnGrads> grads;
  for (const auto& l : model.layers) grads.push_back(zero_grads(l));
  Matrix dskip = Matrix::Zero(model.skip.rows(), model.skip.cols());
  Matrix d = dlogits;
  for (std::size_t k = model.layers.size(); k-- > 0;) {
    Matrix dh = gcn_backward(d, s, model.layers[k], cache.options[k], cache.layers[k], grads[k]);
    if (k + 1 == model.layers.size()) {
      dskip.noalias() += cache.inputs[k].transpose() * d;
      dh.noalias() += d * model.skip.transpose();
    }
    d = std::move(dh);
  }
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    std::vector<Matrix*> ptrs;
    append_layer_grads(ptrs, grads[k], model.layers[k]);
    for (Matrix* p : ptrs) out.push_back(std::move(*p));
  }
  out.push_back(std::move(dskip));
  return out;
}

Matrix sink_forward(const GraphSample& sample, const SinkModel& model) {
  return softmax_rows(sink_logits(model, sample.adjacency, sample.features));
}

Matrix sink_forward(const frontend::CodePropertyGraph& cpg, const Matrix& features, const SinkModel& model) {
  check_shape(model, features);
  return sink_forward(make_sample(cpg, features), model);
}

}  // namespace vulpath::nn
