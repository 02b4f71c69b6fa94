#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vulpath/nn/models.hpp"

namespace vulpath::nn {

struct GradCheckEntry {
  std::string tensor;
  double relative_error = 0;  // max|a - n| / max(max|a|, max|n|, floor)
  std::size_t coordinates = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> tensors;
  double max_relative_error = 0;
  bool finite = true;
  bool passed = false;
};

struct GradCheckOptions {
  double tolerance = 1e-4;
  double step = 1e-6;
  int coordinates_per_tensor = 16;
  std::uint64_t seed = 1;
};

/// Central differences of the train-mode loss (fixed dropout masks) against
/// the analytic gradient. Sink loss: weighted cross entropy over the sample's
/// node labels with weights {1, 2}. Detector loss: binary cross entropy.
GradCheckReport finite_diff_check(const SinkModel& model, const GraphSample& sample,
                                  const GradCheckOptions& options = {});
GradCheckReport finite_diff_check(const DetectorModel& model, const GraphSample& sample,
                                  const GradCheckOptions& options = {});

}  // namespace vulpath::nn
