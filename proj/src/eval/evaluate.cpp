#include <algorithm>
#include <cstdio>
#include <sstream>

#include "vulpath/error.hpp"
#include "vulpath/eval/evaluate.hpp"

namespace vulpath::eval {

using corpus::Bucket;

namespace {

std::set<int> path_lines(const ranker::Explanation& e) {
  return {e.chosen.path.lines.begin(), e.chosen.path.lines.end()};
}

FunctionRecord run_method(const PreparedFunction& f, const std::string& method, const nn::SinkCheckpoint& sink,
                          const nn::DetectorCheckpoint& detector, const RunConfig& config) {
  FunctionRecord r;
  r.id = f.entry.id;
  r.method = method;
  r.ground_truth = {f.entry.sink_lines.begin(), f.entry.sink_lines.end()};
  try {
    if (method == "vulpathfinder") {
      r.predicted = path_lines(explain_function(f.cpg, sink, detector, config));
    } else if (method == "rules+slicing") {
      r.predicted = path_lines(explain_rules(f.cpg, detector, config));
    } else if (method == "edge_mask") {
      r.predicted = explain_edge_mask(f.cpg, detector, config).lines;
    } else {
      throw ConfigError("unknown method '" + method + "'");
    }
  } catch (const NoPaths& e) {
    r.note = e.what();
  }
  r.tlc = tlc(r.predicted, r.ground_truth);
  return r;
}

}  // namespace

EvalReport evaluate_corpus(const Dataset& data, const std::vector<std::string>& methods,
                           const nn::SinkCheckpoint& sink, const nn::DetectorCheckpoint& detector,
                           const RunConfig& config) {
  for (const auto& m : methods)
    if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end())
      throw ConfigError("unknown method '" + m + "'");
  const auto test = data.bucket(Bucket::Test);
  if (test.empty()) throw EmptyTestSplit("test split is empty");

  EvalReport report;
  report.skipped = data.skipped;
  report.test_functions = test.size();

  const auto sink_samples = make_samples(test, sink.embedding);
  std::vector<const nn::GraphSample*> members;
  for (const auto& smp : sink_samples) members.push_back(&smp);
  const nn::GraphBatch batch = nn::make_batch(members);
  const nn::Matrix probs = nn::softmax_rows(nn::sink_logits(sink.model, batch.adjacency, batch.features));
  std::vector<int> thresholded(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i)
    thresholded[static_cast<std::size_t>(i)] = probs(i, 1) >= config.sink.threshold ? 1 : 0;
  report.sink = node_metrics(thresholded, batch.node_labels);
  report.detector_accuracy = nn::detector_accuracy(detector.model, make_samples(test, detector.embedding));

  std::vector<const PreparedFunction*> vulnerable;
  for (const auto* f : test)
    if (f->entry.vulnerable && !f->entry.sink_lines.empty()) vulnerable.push_back(f);
  report.vulnerable_functions = vulnerable.size();

  std::vector<FunctionRecord> records(vulnerable.size() * methods.size());
  parallel_for(records.size(), config.jobs, [&](std::size_t i) {
    records[i] = run_method(*vulnerable[i / methods.size()], methods[i % methods.size()], sink, detector, config);
  });
  for (const auto& m : methods) {
    double total = 0;
    std::size_t count = 0;
    for (const auto& r : records)
      if (r.method == m) {
        total += r.tlc;
        ++count;
      }
    report.mean_tlc[m] = count ? total / static_cast<double>(count) : 0.0;
  }
  report.records = std::move(records);
  return report;
}

nlohmann::json report_json(const EvalReport& r) {
  using nlohmann::json;
  json methods = json::object();
  for (const auto& [m, v] : r.mean_tlc) methods[m] = {{"mean_tlc", v}, {"functions", r.vulnerable_functions}};
  json functions = json::array();
  for (const auto& f : r.records) {
    json rec{{"id", f.id},
             {"method", f.method},
             {"predicted_lines", f.predicted},
             {"ground_truth", f.ground_truth},
             {"tlc", f.tlc}};
    if (!f.note.empty()) rec["note"] = f.note;
    functions.push_back(std::move(rec));
  }
  json skipped = json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"id", s.id}, {"reason", s.reason}});
  const auto& s = r.sink;
  return {{"sink_model",
           {{"precision", s.precision},
            {"recall", s.recall},
            {"f1", s.f1},
            {"macro_precision", s.macro_precision},
            {"macro_recall", s.macro_recall},
            {"f1_macro", s.f1_macro},
            {"confusion", s.confusion},
            {"precision_undefined", s.precision_undefined},
            {"recall_undefined", s.recall_undefined}}},
          {"detector", {{"accuracy", r.detector_accuracy}}},
          {"methods", std::move(methods)},
          {"test_functions", r.test_functions},
          {"vulnerable_functions", r.vulnerable_functions},
          {"functions", std::move(functions)},
          {"skipped", std::move(skipped)}};
}

std::string report_table(const EvalReport& r) {
  std::ostringstream out;
  char buf[160];
  out << "Sink classifier (test statements)\n";
  std::snprintf(buf, sizeof buf, "  %-10s %-10s %-10s %-10s\n", "Precision", "Recall", "F1", "F1-Macro");
  out << buf;
  std::snprintf(buf, sizeof buf, "  %-10.4f %-10.4f %-10.4f %-10.4f\n", r.sink.precision, r.sink.recall, r.sink.f1,
                r.sink.f1_macro);
  out << buf;
  std::snprintf(buf, sizeof buf, "  confusion [[%lld, %lld], [%lld, %lld]] (rows: label, cols: prediction)\n",
                static_cast<long long>(r.sink.confusion[0][0]), static_cast<long long>(r.sink.confusion[0][1]),
                static_cast<long long>(r.sink.confusion[1][0]), static_cast<long long>(r.sink.confusion[1][1]));
  out << buf;
  std::snprintf(buf, sizeof buf, "Detector accuracy (test functions): %.4f\n", r.detector_accuracy);
  out << buf;
  std::snprintf(buf, sizeof buf, "Mean TLC over %zu vulnerable test functions\n", r.vulnerable_functions);
  out << buf;
  std::snprintf(buf, sizeof buf, "  %-16s %s\n", "Method", "TLC");
  out << buf;
  for (const auto& m : kMethods) {
    auto it = r.mean_tlc.find(m);
    if (it == r.mean_tlc.end()) continue;
    std::snprintf(buf, sizeof buf, "  %-16s %.4f\n", m.c_str(), it->second);
    out << buf;
  }
  if (!r.skipped.empty()) out << "Skipped entries: " << r.skipped.size() << "\n";
  return out.str();
}

}  // namespace vulpath::eval
