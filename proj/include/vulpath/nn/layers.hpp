#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vulpath/nn/graph_batch.hpp"

namespace vulpath::nn {

enum class Mode : std::uint8_t { Train, Eval };

/// Graph convolution weights with optional batch norm. Vectors are stored as
/// 1 x out_dim matrices so every tensor shares one type.
struct GcnLayerParams {
  Matrix weight;  // in_dim x out_dim
  Matrix bias;    // used only without batch norm
  Matrix gamma, beta;
  Matrix running_mean, running_var;
  bool batch_norm = true;

  Eigen::Index in_dim() const { return weight.rows(); }
  Eigen::Index out_dim() const { return weight.cols(); }
};

/// Glorot-uniform weights, zero bias, unit gamma, zero beta, unit running var.
GcnLayerParams make_layer(Eigen::Index in_dim, Eigen::Index out_dim, bool batch_norm, std::uint64_t seed);

inline constexpr double kBatchNormEps = 1e-5;

struct BatchNormCache {
  Matrix xhat;
  Eigen::RowVectorXd inv_std;
  bool train = true;
};

/// Train: column statistics over rows, running stats blended with `momentum`.
/// Eval: running statistics.
Matrix batchnorm(const Matrix& x, GcnLayerParams& layer, Mode mode, double momentum = 0.1,
                 BatchNormCache* cache = nullptr);
/// Eval-mode batch norm on a read-only layer.
Matrix batchnorm(const Matrix& x, const GcnLayerParams& layer, BatchNormCache* cache = nullptr);
/// Backward for either mode. Accumulates into `dgamma`/`dbeta`.
Matrix batchnorm_backward(const Matrix& dy, const GcnLayerParams& layer, const BatchNormCache& cache,
                          Matrix& dgamma, Matrix& dbeta);

/// Inverted dropout. `mask` receives the keep/scale factors in train mode.
Matrix dropout(const Matrix& x, double p, Mode mode, std::uint64_t seed, Matrix* mask = nullptr);

struct GcnOptions {
  bool relu = true;
  bool residual = false;  // add the layer input to the pre-activation
  double dropout = 0.0;
  std::uint64_t seed = 0;
  double momentum = 0.1;
};

struct GcnCache {
  Matrix propagated;      // S H
  Matrix pre_activation;  // after batch norm and residual
  BatchNormCache bn;
  Matrix mask;
};

struct GcnGrads {
  Matrix weight, bias, gamma, beta;
};

GcnGrads zero_grads(const GcnLayerParams& layer);

/// S H W (+ bias), batch norm, residual, ReLU, dropout.
Matrix gcn_forward(const Matrix& h, const SparseMatrix& s, GcnLayerParams& layer, const GcnOptions& options,
                   Mode mode, GcnCache* cache = nullptr);
/// Eval-mode forward that leaves the layer untouched.
Matrix gcn_forward(const Matrix& h, const SparseMatrix& s, const GcnLayerParams& layer, const GcnOptions& options,
                   GcnCache* cache = nullptr);
/// Returns dL/dH and accumulates parameter grads. When `dadjacency` is set,
/// dL/dS is accumulated into it as well (dense).
Matrix gcn_backward(const Matrix& dout, const SparseMatrix& s, const GcnLayerParams& layer,
                    const GcnOptions& options, const GcnCache& cache, GcnGrads& grads,
                    Matrix* dadjacency = nullptr, const Matrix* h = nullptr);

Matrix softmax_rows(const Matrix& logits);

/// Named handle used by the optimizer, checkpoints and gradient checks.
struct NamedTensor {
  std::string name;
  Matrix* value;
  bool trainable;
};

void append_layer_tensors(std::vector<NamedTensor>& out, const std::string& prefix, GcnLayerParams& layer);
void append_layer_grads(std::vector<Matrix*>& out, GcnGrads& grads, const GcnLayerParams& layer);

}  // namespace vulpath::nn
