#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vulpath/eval/metrics.hpp"
#include "vulpath/pipeline.hpp"

namespace vulpath::eval {

inline const std::vector<std::string> kMethods{"vulpathfinder", "rules+slicing", "edge_mask"};

struct FunctionRecord {
  std::string id;
  std::string method;
  std::set<int> predicted;     // s_e
  std::set<int> ground_truth;  // s_v
  double tlc = 0;
  std::string note;  // why a method produced nothing, if it did not
};

struct EvalReport {
  std::vector<FunctionRecord> records;     // vulnerable test functions only
  std::map<std::string, double> mean_tlc;  // per method
  NodeMetrics sink;                        // statement nodes of the test split
  double detector_accuracy = 0;
  std::size_t test_functions = 0;
  std::size_t vulnerable_functions = 0;
  std::vector<Skipped> skipped;
};

/// Runs each method on the vulnerable test functions and averages TLC per
/// method; non-vulnerable functions only enter the classifier metrics.
/// Throws EmptyTestSplit.
EvalReport evaluate_corpus(const Dataset& data, const std::vector<std::string>& methods,
                           const nn::SinkCheckpoint& sink, const nn::DetectorCheckpoint& detector,
                           const RunConfig& config);

nlohmann::json report_json(const EvalReport& report);
/// Plain-text summary: classifier metrics followed by mean TLC per method.
std::string report_table(const EvalReport& report);

}  // namespace vulpath::eval
