#pragma once

#include <cstdint>
#include <vector>

#include "vulpath/nn/layers.hpp"

namespace vulpath::nn {

struct SinkModelConfig {
  int in_dim = 128;
  int hidden = 256;
  int layers = 6;
  double dropout = 0.5;
};

/// Node classifier: `layers - 1` hidden GCN blocks (batch norm, ReLU,
/// dropout; residual where widths match) and a final GCN to 2 logits with a
/// learned skip projection from the last hidden block.
struct SinkModel {
  SinkModelConfig config;
  std::vector<GcnLayerParams> layers;
  Matrix skip;  // hidden x 2

  static SinkModel create(const SinkModelConfig& config, std::uint64_t seed);
  std::vector<NamedTensor> tensors();
  std::vector<int> dims() const;
};

struct SinkForwardCache {
  std::vector<Matrix> inputs;  // input of each layer
  std::vector<GcnCache> layers;
  std::vector<GcnOptions> options;
};

/// Logits (n x 2). Train mode updates batch-norm running statistics.
Matrix sink_logits(SinkModel& model, const SparseMatrix& s, const Matrix& x, Mode mode, std::uint64_t seed,
                   SinkForwardCache* cache = nullptr);
Matrix sink_logits(const SinkModel& model, const SparseMatrix& s, const Matrix& x);
/// Gradients aligned with the trainable entries of `model.tensors()`.
std::vector<Matrix> sink_backward(SinkModel& model, const SparseMatrix& s, const SinkForwardCache& cache,
                                  const Matrix& dlogits);

/// Eval-mode per-node (non-sink, sink) probabilities.
Matrix sink_forward(const frontend::CodePropertyGraph& cpg, const Matrix& features, const SinkModel& model);
Matrix sink_forward(const GraphSample& sample, const SinkModel& model);

struct DetectorConfig {
  int in_dim = 128;
  int hidden = 128;
  int layers = 3;
  double dropout = 0.0;
};

/// Graph classifier: GCN blocks, mean pooling over statement rows, affine
/// readout, logistic output.
struct DetectorModel {
  DetectorConfig config;
  std::vector<GcnLayerParams> layers;
  Matrix readout_weight;  // hidden x 1
  Matrix readout_bias;    // 1 x 1

  static DetectorModel create(const DetectorConfig& config, std::uint64_t seed);
  std::vector<NamedTensor> tensors();
  std::vector<int> dims() const;
};

struct DetectorForwardCache {
  std::vector<Matrix> inputs;
  std::vector<GcnCache> layers;
  std::vector<GcnOptions> options;
  Matrix pooled;  // graphs x hidden
};

/// One logit per graph of the batch. Throws EmptyGraph when a graph has no
/// statement rows.
Eigen::VectorXd detector_logits(DetectorModel& model, const GraphBatch& batch, Mode mode, std::uint64_t seed,
                                DetectorForwardCache* cache = nullptr);
Eigen::VectorXd detector_logits(const DetectorModel& model, const GraphBatch& batch,
                                DetectorForwardCache* cache = nullptr);
/// Gradients aligned with the trainable tensors. `dadjacency` receives dL/dS.
std::vector<Matrix> detector_backward(const DetectorModel& model, const GraphBatch& batch,
                                      const DetectorForwardCache& cache, const Eigen::VectorXd& dlogits,
                                      Matrix* dadjacency = nullptr);

double detector_forward(const frontend::CodePropertyGraph& cpg, const Matrix& features, const DetectorModel& model);
double detector_forward(const GraphSample& sample, const DetectorModel& model);

double sigmoid(double x);

}  // namespace vulpath::nn
