#include <algorithm>
#include <cmath>
#include <random>

#include "vulpath/nn/gradcheck.hpp"
#include "vulpath/nn/loss.hpp"

namespace vulpath::nn {
namespace {

constexpr double kFloor = 1e-7;
constexpr std::uint64_t kDropoutSeed = 99;

template <typename Model, typename LossAndGrad>
GradCheckReport check(Model model, const GradCheckOptions& options, LossAndGrad&& loss_and_grad) {
  const std::vector<Matrix> analytic = loss_and_grad(model, true).second;
  std::mt19937_64 rng(options.seed);
  GradCheckReport report;
  std::size_t index = 0;
  for (auto& t : model.tensors()) {
    if (!t.trainable) continue;
    Matrix& value = *t.value;
    const Matrix& grad = analytic[index++];
    std::vector<Eigen::Index> coords(static_cast<std::size_t>(value.size()));
    for (Eigen::Index i = 0; i < value.size(); ++i) coords[static_cast<std::size_t>(i)] = i;
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(std::min(coords.size(), static_cast<std::size_t>(std::max(options.coordinates_per_tensor, 1))));
    double max_diff = 0, max_a = 0, max_n = 0;
    for (Eigen::Index i : coords) {
      const double saved = value(i);
      value(i) = saved + options.step;
      const double plus = loss_and_grad(model, false).first;
      value(i) = saved - options.step;
      const double minus = loss_and_grad(model, false).first;
      value(i) = saved;
      const double numeric = (plus - minus) / (2 * options.step);
      const double a = grad(i);
      if (!std::isfinite(numeric) || !std::isfinite(a)) report.finite = false;
      max_diff = std::max(max_diff, std::abs(a - numeric));
      max_a = std::max(max_a, std::abs(a));
      max_n = std::max(max_n, std::abs(numeric));
    }
    const double rel = max_diff / std::max({max_a, max_n, kFloor});
    report.tensors.push_back({t.name, rel, coords.size()});
    report.max_relative_error = std::max(report.max_relative_error, rel);
  }
  report.passed = report.finite && report.max_relative_error <= options.tolerance;
  return report;
}

}  // namespace

GradCheckReport finite_diff_check(const SinkModel& model, const GraphSample& sample, const GradCheckOptions& options) {
  std::vector<int> labels = sample.node_labels;
  for (int& y : labels)
    if (y < 0) y = 0;
  const std::array<double, 2> weights{1.0, 2.0};
  return check(model, options, [&](SinkModel& m, bool want_grad) {
    SinkForwardCache cache;
    const Matrix probs =
        softmax_rows(sink_logits(m, sample.adjacency, sample.features, Mode::Train, kDropoutSeed, &cache));
    const LossResult loss = weighted_cross_entropy(probs, labels, weights);
    std::vector<Matrix> grads;
    if (want_grad) grads = sink_backward(m, sample.adjacency, cache, softmax_backward(probs, loss.grad));
    return std::make_pair(loss.loss, grads);
  });
}

GradCheckReport finite_diff_check(const DetectorModel& model, const GraphSample& sample,
                                  const GradCheckOptions& options) {
  const GraphBatch batch = make_batch({&sample});
  return check(model, options, [&](DetectorModel& m, bool want_grad) {
    DetectorForwardCache cache;
    const Eigen::VectorXd logits = detector_logits(m, batch, Mode::Train, kDropoutSeed, &cache);
    const LossResult loss = binary_cross_entropy_logits(logits, batch.graph_labels);
    std::vector<Matrix> grads;
    if (want_grad) grads = detector_backward(m, batch, cache, loss.grad.col(0));
    return std::make_pair(loss.loss, grads);
  });
}

}  // namespace vulpath::nn
