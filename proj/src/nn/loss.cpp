#include <algorithm>
#include <cmath>

#include "vulpath/error.hpp"
#include "vulpath/nn/loss.hpp"

namespace vulpath::nn {

LossResult weighted_cross_entropy(const Matrix& probs, const std::vector<int>& labels,
                                  const std::array<double, 2>& class_weights) {
  if (static_cast<std::size_t>(probs.rows()) != labels.size() || probs.cols() != 2)
    throw ShapeMismatch("cross entropy expects n x 2 probabilities and n labels");
  LossResult r{0.0, Matrix::Zero(probs.rows(), probs.cols())};
  std::size_t counted = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) ++counted;
  if (counted == 0) return r;
  const double n = static_cast<double>(counted);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0) continue;
    const auto row = static_cast<Eigen::Index>(i);
    const double p = probs(row, y);
    const double w = class_weights[static_cast<std::size_t>(y)];
    if (p < kProbClamp) {
      r.loss -= w * std::log(kProbClamp);
    } else if (p > 1 - kProbClamp) {
      r.loss -= w * std::log(1 - kProbClamp);
    } else {
      r.loss -= w * std::log(p);
      r.grad(row, y) = -w / (n * p);
    }
  }
  r.loss /= n;
  return r;
}

Matrix softmax_backward(const Matrix& probs, const Matrix& dprobs) {
  const Eigen::VectorXd dot = (probs.array() * dprobs.array()).rowwise().sum();
  return (probs.array() * (dprobs.colwise() - dot).array()).matrix();
}

LossResult binary_cross_entropy_logits(const Eigen::VectorXd& logits, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(logits.size()) != labels.size())
    throw ShapeMismatch("binary cross entropy expects one label per logit");
  LossResult r{0.0, Matrix::Zero(logits.size(), 1)};
  if (labels.empty()) return r;
  const double n = static_cast<double>(labels.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double z = logits(i);
    const double y = labels[static_cast<std::size_t>(i)] > 0 ? 1.0 : 0.0;
    // softplus(z) - y z, computed stably
    r.loss += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - y * z;
    const double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    r.grad(i, 0) = (p - y) / n;
  }
  r.loss /= n;
  return r;
}

std::array<double, 2> inverse_frequency_weights(const std::vector<int>& labels) {
  std::array<double, 2> count{0, 0};
  for (int y : labels)
    if (y == 0 || y == 1) count[static_cast<std::size_t>(y)] += 1;
  const double total = count[0] + count[1];
  std::array<double, 2> w{1.0, 1.0};
  for (std::size_t c = 0; c < 2; ++c)
    if (count[c] > 0) w[c] = total / (2.0 * count[c]);
  return w;
}

}  // namespace vulpath::nn
