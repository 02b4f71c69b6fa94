#include <algorithm>
#include <iterator>

#include "vulpath/error.hpp"
#include "vulpath/eval/metrics.hpp"

namespace vulpath::eval {
namespace {

double ratio(std::int64_t num, std::int64_t den, bool* undefined) {
  if (den == 0) {
    if (undefined) *undefined = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

}  // namespace

NodeMetrics node_metrics(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) throw ShapeMismatch("predictions and labels differ in length");
  NodeMetrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) continue;
    ++m.confusion[labels[i] > 0 ? 1 : 0][predictions[i] > 0 ? 1 : 0];
  }
  const auto& c = m.confusion;
  m.precision = ratio(c[1][1], c[1][1] + c[0][1], &m.precision_undefined);
  m.recall = ratio(c[1][1], c[1][1] + c[1][0], &m.recall_undefined);
  m.f1 = harmonic(m.precision, m.recall);
  const double neg_precision = ratio(c[0][0], c[0][0] + c[1][0], nullptr);
  const double neg_recall = ratio(c[0][0], c[0][0] + c[0][1], nullptr);
  m.macro_precision = (m.precision + neg_precision) / 2;
  m.macro_recall = (m.recall + neg_recall) / 2;
  m.f1_macro = (m.f1 + harmonic(neg_precision, neg_recall)) / 2;
  m.accuracy = ratio(c[0][0] + c[1][1], m.total(), nullptr);
  return m;
}

double tlc(const std::set<int>& predicted, const std::set<int>& ground_truth) {
  if (ground_truth.empty()) throw EmptyGroundTruth("ground-truth line set is empty");
  std::vector<int> common;
  std::set_intersection(predicted.begin(), predicted.end(), ground_truth.begin(), ground_truth.end(),
                        std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(ground_truth.size());
}

}  // namespace vulpath::eval
