#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <vector>

namespace vulpath::eval {

/// Sink-class (label 1) metrics plus macro averages over both classes.
/// A zero denominator yields 0 and raises the matching flag.
struct NodeMetrics {
  double precision = 0;  // sink class
  double recall = 0;     // sink class
  double f1 = 0;         // sink class
  double macro_precision = 0;
  double macro_recall = 0;
  double f1_macro = 0;
  double accuracy = 0;
  // confusion[label][prediction]
  std::array<std::array<std::int64_t, 2>, 2> confusion{};
  bool precision_undefined = false;
  bool recall_undefined = false;

  std::int64_t total() const {
    return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
  }
};

/// Pairs with a negative label are skipped.
NodeMetrics node_metrics(const std::vector<int>& predictions, const std::vector<int>& labels);

/// Triggering line coverage |s_e ∩ s_v| / |s_v|. Throws EmptyGroundTruth.
double tlc(const std::set<int>& predicted, const std::set<int>& ground_truth);

}  // namespace vulpath::eval
