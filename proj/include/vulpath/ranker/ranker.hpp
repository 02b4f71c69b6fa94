#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vulpath/nn/models.hpp"
#include "vulpath/slicer/slicer.hpp"

namespace vulpath::ranker {

struct ScoredPath {
  slicer::CandidatePath path;
  double p_g = 0;
  double importance = 0;
};

struct Explanation {
  std::string function;
  double p_G = 0;
  ScoredPath chosen;
  std::vector<ScoredPath> alternatives;  // descending importance
};

/// Eval-mode detector probability of the whole graph.
double graph_probability(const frontend::CodePropertyGraph& cpg, const nn::Matrix& features,
                         const nn::DetectorModel& detector);

/// Induced subgraph over the path statements and their AST subtrees; entry
/// and exit become the first and last path node. Throws InvalidPath for an
/// empty path, a repeated node or a node that is not a statement.
frontend::CodePropertyGraph path_subgraph(const frontend::CodePropertyGraph& cpg, const slicer::CandidatePath& path);

/// Rows of `features` (indexed like `cpg.nodes`) for the nodes of `sub`.
nn::Matrix subgraph_features(const frontend::CodePropertyGraph& cpg, const frontend::CodePropertyGraph& sub,
                             const nn::Matrix& features);

/// 1 - (p_G - p_g), unclamped.
inline double importance_score(double p_G, double p_g) { return 1.0 - (p_G - p_g); }

/// Strict ranking: higher importance, then fewer nodes, then smaller line
/// sequence, then smaller node sequence.
bool ranks_before(const ScoredPath& a, const ScoredPath& b);

/// Scores every path and returns the best first. Throws NoPaths.
Explanation select_explanation(const frontend::CodePropertyGraph& cpg, const std::vector<slicer::CandidatePath>& paths,
                               const nn::DetectorModel& detector, const nn::Matrix& features);

/// Ranks already-scored paths (used when p_g values come from elsewhere).
Explanation rank_scored(std::string function, double p_G, std::vector<ScoredPath> scored);

nlohmann::json explanation_json(const Explanation& explanation);

}  // namespace vulpath::ranker
