#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "vulpath/error.hpp"
#include "vulpath/pipeline.hpp"
#include "vulpath/util/md5.hpp"

namespace vulpath {

using corpus::Bucket;
using frontend::CodePropertyGraph;

std::vector<const PreparedFunction*> Dataset::bucket(Bucket b) const {
  std::vector<const PreparedFunction*> out;
  for (const auto& f : functions) {
    auto it = split.bucket.find(f.entry.id);
    if (it != split.bucket.end() && it->second == b) out.push_back(&f);
  }
  return out;
}

Dataset prepare_dataset(const std::vector<corpus::CorpusEntry>& entries, const RunConfig& config) {
  Dataset data;
  std::vector<corpus::CorpusEntry> kept;
  const auto unique = corpus::dedup_md5(entries);
  std::set<std::string> unique_ids;
  for (const auto& e : unique) unique_ids.insert(e.id);
  for (const auto& e : entries)
    if (!unique_ids.count(e.id)) data.skipped.push_back({e.id, "duplicate of an earlier entry"});
  for (const auto& e : unique) {
    try {
      PreparedFunction f{e, frontend::build_cpg(e.source), {}};
      f.labels = corpus::align_labels(e, f.cpg);
      data.functions.push_back(std::move(f));
      kept.push_back(e);
    } catch (const Error& err) {
      data.skipped.push_back({e.id, err.what()});
    }
  }
  data.split = corpus::split_corpus(kept, config.seed, config.split);
  return data;
}

std::uint64_t derived_seed(std::uint64_t seed, const std::string& key) {
  const std::string hex = util::md5_hex(std::to_string(seed) + ":" + key);
  return std::stoull(hex.substr(0, 16), nullptr, 16);
}

features::EmbeddingTable train_embedding(const Dataset& data, const RunConfig& config,
                                         features::SkipGramStats* stats) {
  const auto& e = config.embedding;
  std::vector<features::Walk> walks;
  for (const auto* f : data.bucket(Bucket::Train)) {
    auto w = features::generate_walks(f->cpg, e.walks_per_node, e.walk_len, derived_seed(config.seed, f->entry.id));
    std::move(w.begin(), w.end(), std::back_inserter(walks));
  }
  features::SkipGramConfig sg;
  sg.dims = e.dims;
  sg.window = e.window;
  sg.negatives = e.negatives;
  sg.epochs = e.epochs;
  sg.lr = e.lr;
  sg.min_count = e.min_count;
  sg.sample = e.sample;
  sg.seed = config.seed;
  return features::train_skipgram(walks, sg, stats);
}

std::vector<nn::GraphSample> make_samples(const std::vector<const PreparedFunction*>& functions,
                                          const features::EmbeddingTable& table) {
  std::vector<nn::GraphSample> out;
  out.reserve(functions.size());
  for (const auto* f : functions)
    out.push_back(nn::make_sample(f->cpg, features::node_feature_matrix(f->cpg, table), f->labels,
                                  f->entry.vulnerable ? 1 : 0));
  return out;
}

nn::SinkCheckpoint train_sink_model(const Dataset& data, const features::EmbeddingTable& table,
                                    const RunConfig& config, nn::TrainReport* report) {
  const auto& p = config.sink;
  nn::SinkModelConfig mc{table.dims(), p.hidden, p.layers, p.dropout};
  nn::TrainConfig tc{p.epochs, p.batch, p.lr, config.seed};
  nn::SinkCheckpoint ckpt;
  ckpt.model = nn::train_sink(make_samples(data.bucket(Bucket::Train), table),
                              make_samples(data.bucket(Bucket::Validation), table), mc, tc, report);
  ckpt.embedding = table;
  ckpt.train = {{"epochs", p.epochs}, {"batch", p.batch}, {"lr", p.lr}, {"threshold", p.threshold}};
  ckpt.seed = config.seed;
  return ckpt;
}

nn::DetectorCheckpoint train_detector_model(const Dataset& data, const features::EmbeddingTable& table,
                                            const RunConfig& config, nn::TrainReport* report) {
  const auto& p = config.detector;
  nn::DetectorConfig mc{table.dims(), p.hidden, p.layers, p.dropout};
  nn::TrainConfig tc{p.epochs, p.batch, p.lr, config.seed};
  nn::DetectorCheckpoint ckpt;
  ckpt.model = nn::train_detector(make_samples(data.bucket(Bucket::Train), table),
                                  make_samples(data.bucket(Bucket::Validation), table), mc, tc, report);
  ckpt.embedding = table;
  ckpt.train = {{"epochs", p.epochs}, {"batch", p.batch}, {"lr", p.lr}};
  ckpt.seed = config.seed;
  return ckpt;
}

std::vector<SinkPrediction> rank_statements(const CodePropertyGraph& cpg, const nn::SinkCheckpoint& sink) {
  const nn::Matrix probs = nn::sink_forward(cpg, features::node_feature_matrix(cpg, sink.embedding), sink.model);
  std::vector<SinkPrediction> out;
  for (std::size_t i = 0; i < cpg.size(); ++i)
    if (cpg.nodes[i].is_statement)
      out.push_back({cpg.nodes[i].id, cpg.nodes[i].line, probs(static_cast<Eigen::Index>(i), 1)});
  std::stable_sort(out.begin(), out.end(),
                   [](const SinkPrediction& a, const SinkPrediction& b) { return a.probability > b.probability; });
  return out;
}

std::vector<SinkPrediction> potential_sinks(const std::vector<SinkPrediction>& ranked, double threshold) {
  std::vector<SinkPrediction> out;
  for (const auto& p : ranked)
    if (p.probability >= threshold) out.push_back(p);
  if (out.empty() && !ranked.empty()) out.push_back(ranked.front());
  return out;
}

std::vector<slicer::CandidatePath> candidate_paths(const CodePropertyGraph& cpg, const std::vector<int>& sinks,
                                                   const SlicerParams& limits) {
  std::vector<slicer::CandidatePath> out;
  for (int s : sinks) {
    auto paths = slicer::enumerate_paths(cpg, s, {limits.max_depth, limits.max_paths});
    if (paths.empty()) paths.push_back({{s}, {cpg.node(s).line}, s});
    std::move(paths.begin(), paths.end(), std::back_inserter(out));
  }
  return out;
}

namespace {

nn::Matrix detector_features(const CodePropertyGraph& cpg, const nn::DetectorCheckpoint& detector) {
  return features::node_feature_matrix(cpg, detector.embedding);
}

}  // namespace

ranker::Explanation explain_function(const CodePropertyGraph& cpg, const nn::SinkCheckpoint& sink,
                                     const nn::DetectorCheckpoint& detector, const RunConfig& config) {
  std::vector<int> sinks;
  for (const auto& p : potential_sinks(rank_statements(cpg, sink), config.sink.threshold)) sinks.push_back(p.node);
  return ranker::select_explanation(cpg, candidate_paths(cpg, sinks, config.slicer), detector.model,
                                    detector_features(cpg, detector));
}

ranker::Explanation explain_rules(const CodePropertyGraph& cpg, const nn::DetectorCheckpoint& detector,
                                  const RunConfig& config) {
  baselines::RuleConfig rules{config.baselines.api_list};
  const auto sinks = baselines::rule_sink_statements(cpg, baselines::rule_based_sinks(cpg, rules));
  return ranker::select_explanation(cpg, candidate_paths(cpg, sinks, config.slicer), detector.model,
                                    detector_features(cpg, detector));
}

baselines::EdgeMaskResult explain_edge_mask(const CodePropertyGraph& cpg, const nn::DetectorCheckpoint& detector,
                                            const RunConfig& config) {
  const auto& b = config.baselines;
  baselines::EdgeMaskConfig mc{b.lambda, b.steps, b.k, b.lr, derived_seed(config.seed, cpg.function_name)};
  return baselines::edge_mask_explain(cpg, detector_features(cpg, detector), detector.model, mc);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace vulpath
