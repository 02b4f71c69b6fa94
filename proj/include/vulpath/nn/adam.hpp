#pragma once

#include <cstdint>
#include <vector>

#include "vulpath/nn/graph_batch.hpp"

namespace vulpath::nn {

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::vector<Matrix> m, v;  // lazily sized on the first step
};

/// Bias-corrected Adam update applied in place.
void adam_step(const std::vector<Matrix*>& params, const std::vector<Matrix>& grads, AdamState& state);

}  // namespace vulpath::nn
