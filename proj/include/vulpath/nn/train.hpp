#pragma once

#include <cstdint>
#include <vector>

#include "vulpath/nn/models.hpp"

namespace vulpath::nn {

struct TrainConfig {
  int epochs = 50;
  int batch_size = 64;
  double lr = 1e-3;
  std::uint64_t seed = 42;
};

struct TrainReport {
  std::vector<double> train_loss;        // mean batch loss per epoch
  std::vector<double> validation_score;  // macro F1 (sink) or accuracy (detector)
  int best_epoch = 0;                    // 0 = initial weights
  double best_score = -1;
};

/// Samples carry node labels. Graphs holding a sink are oversampled to parity
/// with the others; class weights come from the unsampled training nodes.
/// Keeps the weights with the best validation macro F1. Throws NoPositives.
SinkModel train_sink(const std::vector<GraphSample>& train, const std::vector<GraphSample>& validation,
                     const SinkModelConfig& model_config, const TrainConfig& config, TrainReport* report = nullptr);

/// Samples carry graph labels; keeps the weights with the best validation
/// accuracy. Throws SingleClass.
DetectorModel train_detector(const std::vector<GraphSample>& train, const std::vector<GraphSample>& validation,
                             const DetectorConfig& model_config, const TrainConfig& config,
                             TrainReport* report = nullptr);

/// Thresholded eval-mode predictions over a whole set.
std::vector<int> predict_sink_labels(const SinkModel& model, const std::vector<GraphSample>& samples,
                                     std::vector<int>* labels = nullptr);
double detector_accuracy(const DetectorModel& model, const std::vector<GraphSample>& samples);

}  // namespace vulpath::nn
