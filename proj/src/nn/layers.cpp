#include <cmath>
#include <random>

#include "vulpath/error.hpp"
#include "vulpath/nn/layers.hpp"

namespace vulpath::nn {

GcnLayerParams make_layer(Eigen::Index in_dim, Eigen::Index out_dim, bool batch_norm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  std::uniform_real_distribution<double> u(-limit, limit);
  GcnLayerParams p;
  p.weight.resize(in_dim, out_dim);
  for (Eigen::Index r = 0; r < in_dim; ++r)
    for (Eigen::Index c = 0; c < out_dim; ++c) p.weight(r, c) = u(rng);
  p.bias = Matrix::Zero(1, out_dim);
  p.gamma = Matrix::Ones(1, out_dim);
  p.beta = Matrix::Zero(1, out_dim);
  p.running_mean = Matrix::Zero(1, out_dim);
  p.running_var = Matrix::Ones(1, out_dim);
  p.batch_norm = batch_norm;
  return p;
}

namespace {

Matrix normalize(const Matrix& x, const GcnLayerParams& layer, const Eigen::RowVectorXd& mean,
                 const Eigen::RowVectorXd& var, bool train, BatchNormCache* cache) {
  const Eigen::RowVectorXd inv_std = (var.array() + kBatchNormEps).rsqrt();
  Matrix xhat = (x.rowwise() - mean).array().rowwise() * inv_std.array();
  Matrix y = (xhat.array().rowwise() * layer.gamma.row(0).array()).rowwise() + layer.beta.row(0).array();
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = inv_std;
    cache->train = train;
  }
  return y;
}

}  // namespace

Matrix batchnorm(const Matrix& x, GcnLayerParams& layer, Mode mode, double momentum, BatchNormCache* cache) {
  if (mode == Mode::Eval) return batchnorm(x, static_cast<const GcnLayerParams&>(layer), cache);
  if (x.cols() != layer.gamma.cols()) throw ShapeMismatch("batch norm width mismatch");
  const auto n = static_cast<double>(x.rows());
  const Eigen::RowVectorXd mean = x.colwise().sum() / n;
  const Eigen::RowVectorXd var = (x.rowwise() - mean).array().square().colwise().sum() / n;
  layer.running_mean = (1 - momentum) * layer.running_mean + momentum * Matrix(mean);
  layer.running_var = (1 - momentum) * layer.running_var + momentum * Matrix(var);
  return normalize(x, layer, mean, var, true, cache);
}

Matrix batchnorm(const Matrix& x, const GcnLayerParams& layer, BatchNormCache* cache) {
  if (x.cols() != layer.gamma.cols()) throw ShapeMismatch("batch norm width mismatch");
  return normalize(x, layer, layer.running_mean.row(0), layer.running_var.row(0), false, cache);
}

Matrix batchnorm_backward(const Matrix& dy, const GcnLayerParams& layer, const BatchNormCache& cache,
                          Matrix& dgamma, Matrix& dbeta) {
  const auto n = static_cast<double>(dy.rows());
  dgamma += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  dbeta += dy.colwise().sum();
  if (!cache.train)
    return (dy.array().rowwise() * (layer.gamma.row(0).array() * cache.inv_std.array())).matrix();
  const Matrix dxhat = dy.array().rowwise() * layer.gamma.row(0).array();
  const Eigen::RowVectorXd sum_dxhat = dxhat.colwise().sum();
  const Eigen::RowVectorXd sum_dxhat_xhat = (dxhat.array() * cache.xhat.array()).colwise().sum();
  Matrix dx = (n * dxhat.array()).rowwise() - sum_dxhat.array();
  dx -= (cache.xhat.array().rowwise() * sum_dxhat_xhat.array()).matrix();
  return (dx.array().rowwise() * (cache.inv_std.array() / n)).matrix();
}

Matrix dropout(const Matrix& x, double p, Mode mode, std::uint64_t seed, Matrix* mask) {
  if (mode == Mode::Eval || p <= 0.0) {
    if (mask) *mask = Matrix::Ones(x.rows(), x.cols());
    return x;
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(1.0 - p);
  const double scale = 1.0 / (1.0 - p);
  Matrix m(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    for (Eigen::Index r = 0; r < x.rows(); ++r) m(r, c) = keep(rng) ? scale : 0.0;
  Matrix y = x.cwiseProduct(m);
  if (mask) *mask = std::move(m);
  return y;
}

GcnGrads zero_grads(const GcnLayerParams& layer) {
  return {Matrix::Zero(layer.weight.rows(), layer.weight.cols()), Matrix::Zero(1, layer.out_dim()),
          Matrix::Zero(1, layer.out_dim()), Matrix::Zero(1, layer.out_dim())};
}

namespace {

Matrix gcn_impl(const Matrix& h, const SparseMatrix& s, const GcnLayerParams& layer, GcnLayerParams* stats,
                const GcnOptions& options, Mode mode, GcnCache* cache) {
  if (h.cols() != layer.in_dim())
    throw ShapeMismatch("feature width " + std::to_string(h.cols()) + " != layer input " +
                        std::to_string(layer.in_dim()));
  if (s.rows() != h.rows() || s.cols() != h.rows()) throw ShapeMismatch("adjacency does not match node count");
  if (options.residual && layer.in_dim() != layer.out_dim()) throw ShapeMismatch("residual needs equal widths");
  Matrix propagated = s * h;
  Matrix z = propagated * layer.weight;
  Matrix a;
  if (!layer.batch_norm) {
    a = z.rowwise() + layer.bias.row(0);
  } else if (stats) {
    a = batchnorm(z, *stats, mode, options.momentum, cache ? &cache->bn : nullptr);
  } else {
    a = batchnorm(z, layer, cache ? &cache->bn : nullptr);
  }
  if (options.residual) a += h;
  Matrix out = options.relu ? Matrix(a.cwiseMax(0.0)) : a;
  out = dropout(out, options.dropout, mode, options.seed, cache ? &cache->mask : nullptr);
  if (cache) {
    cache->propagated = std::move(propagated);
    cache->pre_activation = std::move(a);
  }
  return out;
}

}  // namespace

Matrix gcn_forward(const Matrix& h, const SparseMatrix& s, GcnLayerParams& layer, const GcnOptions& options,
                   Mode mode, GcnCache* cache) {
  return gcn_impl(h, s, layer, &layer, options, mode, cache);
}

Matrix gcn_forward(const Matrix& h, const SparseMatrix& s, const GcnLayerParams& layer, const GcnOptions& options,
                   GcnCache* cache) {
  return gcn_impl(h, s, layer, nullptr, options, Mode::Eval, cache);
}

Matrix gcn_backward(const Matrix& dout, const SparseMatrix& s, const GcnLayerParams& layer,
                    const GcnOptions& options, const GcnCache& cache, GcnGrads& grads, Matrix* dadjacency,
                    const Matrix* h) {
  Matrix da = dout.cwiseProduct(cache.mask);
  if (options.relu) da = (cache.pre_activation.array() > 0.0).select(da, 0.0);
  Matrix dz;
  if (layer.batch_norm) {
    dz = batchnorm_backward(da, layer, cache.bn, grads.gamma, grads.beta);
  } else {
    grads.bias += da.colwise().sum();
    dz = da;
  }
  grads.weight.noalias() += cache.propagated.transpose() * dz;
  const Matrix dprop = dz * layer.weight.transpose();
  if (dadjacency) {
    if (!h) throw ShapeMismatch("adjacency gradient needs the layer input");
    dadjacency->noalias() += dprop * h->transpose();
  }
  Matrix dh = s.transpose() * dprop;
  if (options.residual) dh += da;
  return dh;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(r).array() - m).exp();
    out.row(r) = e / e.sum();
  }
  return out;
}

void append_layer_tensors(std::vector<NamedTensor>& out, const std::string& prefix, GcnLayerParams& layer) {
  out.push_back({prefix + ".weight", &layer.weight, true});
  if (layer.batch_norm) {
    out.push_back({prefix + ".gamma", &layer.gamma, true});
    out.push_back({prefix + ".beta", &layer.beta, true});
    out.push_back({prefix + ".running_mean", &layer.running_mean, false});
    out.push_back({prefix + ".running_var", &layer.running_var, false});
  } else {
    out.push_back({prefix + ".bias", &layer.bias, true});
  }
}

void append_layer_grads(std::vector<Matrix*>& out, GcnGrads& grads, const GcnLayerParams& layer) {
  out.push_back(&grads.weight);
  if (layer.batch_norm) {
    out.push_back(&grads.gamma);
    out.push_back(&grads.beta);
  } else {
    out.push_back(&grads.bias);
  }
}

}  // namespace vulpath::nn
