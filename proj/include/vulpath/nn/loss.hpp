#pragma once

#include <array>
#include <vector>

#include "vulpath/nn/graph_batch.hpp"

namespace vulpath::nn {

inline constexpr double kProbClamp = 1e-12;

struct LossResult {
  double loss = 0;
  Matrix grad;  // same shape as the input
};

/// Mean over labeled rows of -w_y log p_y; rows with label < 0 are ignored.
/// `grad` is dL/dprobs (zero where the clamp is active).
LossResult weighted_cross_entropy(const Matrix& probs, const std::vector<int>& labels,
                                  const std::array<double, 2>& class_weights);

/// Chains dL/dprobs through a row softmax.
Matrix softmax_backward(const Matrix& probs, const Matrix& dprobs);

/// Mean binary cross-entropy on logits; `grad` is dL/dlogits (n x 1).
LossResult binary_cross_entropy_logits(const Eigen::VectorXd& logits, const std::vector<int>& labels);

/// Inverse-frequency weights n / (2 n_c) over labeled nodes.
std::array<double, 2> inverse_frequency_weights(const std::vector<int>& labels);

}  // namespace vulpath::nn
