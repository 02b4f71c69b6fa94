#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "vulpath/baselines/edge_mask.hpp"
#include "vulpath/baselines/rules.hpp"
#include "vulpath/config.hpp"
#include "vulpath/corpus/corpus.hpp"
#include "vulpath/features/embedding.hpp"
#include "vulpath/nn/checkpoint.hpp"
#include "vulpath/nn/train.hpp"
#include "vulpath/ranker/ranker.hpp"

namespace vulpath {

struct PreparedFunction {
  corpus::CorpusEntry entry;
  frontend::CodePropertyGraph cpg;
  std::vector<int> labels;  // aligned with cpg.nodes
};

struct Skipped {
  std::string id;
  std::string reason;
};

/// A corpus with graphs built and a split assigned. Entries whose frontend
/// or label alignment fails are listed in `skipped`.
struct Dataset {
  std::vector<PreparedFunction> functions;
  corpus::SplitAssignment split;
  std::vector<Skipped> skipped;

  std::vector<const PreparedFunction*> bucket(corpus::Bucket b) const;
};

Dataset prepare_dataset(const std::vector<corpus::CorpusEntry>& entries, const RunConfig& config);

/// Per-function seed independent of corpus order.
std::uint64_t derived_seed(std::uint64_t seed, const std::string& key);

/// Skip-gram table trained on walks over the training bucket.
features::EmbeddingTable train_embedding(const Dataset& data, const RunConfig& config,
                                         features::SkipGramStats* stats = nullptr);

std::vector<nn::GraphSample> make_samples(const std::vector<const PreparedFunction*>& functions,
                                          const features::EmbeddingTable& table);

nn::SinkCheckpoint train_sink_model(const Dataset& data, const features::EmbeddingTable& table,
                                    const RunConfig& config, nn::TrainReport* report = nullptr);
nn::DetectorCheckpoint train_detector_model(const Dataset& data, const features::EmbeddingTable& table,
                                            const RunConfig& config, nn::TrainReport* report = nullptr);

struct SinkPrediction {
  int node = 0;
  int line = 0;
  double probability = 0;
};

/// Statements ranked by sink probability, highest first (ties: lower id).
std::vector<SinkPrediction> rank_statements(const frontend::CodePropertyGraph& cpg, const nn::SinkCheckpoint& sink);

/// Potential sink points: statements at or above `threshold`; when none
/// qualifies, the single most probable statement.
std::vector<SinkPrediction> potential_sinks(const std::vector<SinkPrediction>& ranked, double threshold);

/// Candidate paths from every sink. Sinks whose dependence chains all loop
/// back on themselves contribute the one-node path [sink].
std::vector<slicer::CandidatePath> candidate_paths(const frontend::CodePropertyGraph& cpg,
                                                   const std::vector<int>& sinks, const SlicerParams& limits);

/// Predicted sinks, backward slicing, detector ranking.
ranker::Explanation explain_function(const frontend::CodePropertyGraph& cpg, const nn::SinkCheckpoint& sink,
                                     const nn::DetectorCheckpoint& detector, const RunConfig& config);

/// Rule-selected sinks, backward slicing, detector ranking. Throws NoPaths
/// when no rule fires.
ranker::Explanation explain_rules(const frontend::CodePropertyGraph& cpg, const nn::DetectorCheckpoint& detector,
                                  const RunConfig& config);

baselines::EdgeMaskResult explain_edge_mask(const frontend::CodePropertyGraph& cpg,
                                            const nn::DetectorCheckpoint& detector, const RunConfig& config);

/// Runs `body(i)` for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace vulpath
