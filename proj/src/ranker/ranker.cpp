#include <algorithm>
#include <map>
#include <set>

#include "vulpath/error.hpp"
#include "vulpath/ranker/ranker.hpp"

namespace vulpath::ranker {

using frontend::CodePropertyGraph;
using frontend::EdgeKind;

double graph_probability(const CodePropertyGraph& cpg, const nn::Matrix& features, const nn::DetectorModel& detector) {
  return nn::detector_forward(cpg, features, detector);
}

CodePropertyGraph path_subgraph(const CodePropertyGraph& cpg, const slicer::CandidatePath& path) {
  if (path.nodes.empty()) throw InvalidPath("path is empty");
  std::set<int> on_path;
  for (int id : path.nodes) {
    if (!cpg.contains(id) || !cpg.node(id).is_statement)
      throw InvalidPath("path node " + std::to_string(id) + " is not a statement of " + cpg.function_name);
    if (!on_path.insert(id).second) throw InvalidPath("path repeats node " + std::to_string(id));
  }
  std::map<int, std::vector<int>> ast_children;
  for (const auto& e : cpg.edges)
    if (e.kind == EdgeKind::AST) ast_children[e.src].push_back(e.dst);

  std::set<int> keep(on_path);
  std::vector<int> stack(path.nodes.begin(), path.nodes.end());
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int c : ast_children[v]) {
      if (cpg.node(c).is_statement && !on_path.count(c)) continue;
      if (keep.insert(c).second) stack.push_back(c);
    }
  }
  CodePropertyGraph sub;
  sub.function_name = cpg.function_name;
  for (const auto& n : cpg.nodes)
    if (keep.count(n.id)) sub.nodes.push_back(n);
  for (const auto& e : cpg.edges)
    if (keep.count(e.src) && keep.count(e.dst)) sub.edges.push_back(e);
  sub.entry = path.nodes.front();
  sub.exit = path.nodes.back();
  sub.finalize();
  return sub;
}

nn::Matrix subgraph_features(const CodePropertyGraph& cpg, const CodePropertyGraph& sub, const nn::Matrix& features) {
  nn::Matrix out(static_cast<Eigen::Index>(sub.size()), features.cols());
  for (std::size_t i = 0; i < sub.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(cpg.index_of(sub.nodes[i].id)));
  return out;
}

bool ranks_before(const ScoredPath& a, const ScoredPath& b) {
  if (a.importance != b.importance) return a.importance > b.importance;
  if (a.path.nodes.size() != b.path.nodes.size()) return a.path.nodes.size() < b.path.nodes.size();
  if (a.path.lines != b.path.lines) return a.path.lines < b.path.lines;
  return a.path.nodes < b.path.nodes;
}

Explanation rank_scored(std::string function, double p_G, std::vector<ScoredPath> scored) {
  if (scored.empty()) throw NoPaths("no candidate paths for " + function);
  std::sort(scored.begin(), scored.end(), ranks_before);
  Explanation e;
  e.function = std::move(function);
  e.p_G = p_G;
  e.chosen = std::move(scored.front());
  e.alternatives.assign(std::make_move_iterator(scored.begin() + 1), std::make_move_iterator(scored.end()));
  return e;
}

Explanation select_explanation(const CodePropertyGraph& cpg, const std::vector<slicer::CandidatePath>& paths,
                               const nn::DetectorModel& detector, const nn::Matrix& features) {
  if (paths.empty()) throw NoPaths("no candidate paths for " + cpg.function_name);
  const double p_G = graph_probability(cpg, features, detector);
  std::vector<ScoredPath> scored;
  for (const auto& p : paths) {
    const CodePropertyGraph sub = path_subgraph(cpg, p);
    const double p_g = nn::detector_forward(sub, subgraph_features(cpg, sub, features), detector);
    scored.push_back({p, p_g, importance_score(p_G, p_g)});
  }
  return rank_scored(cpg.function_name, p_G, std::move(scored));
}

nlohmann::json explanation_json(const Explanation& e) {
  auto scored = [](const ScoredPath& s) {
    return nlohmann::json{{"lines", s.path.lines}, {"p_g", s.p_g}, {"importance", s.importance}};
  };
  nlohmann::json alts = nlohmann::json::array();
  for (const auto& a : e.alternatives) alts.push_back(scored(a));
  return {{"function", e.function}, {"p_G", e.p_G}, {"chosen", scored(e.chosen)}, {"alternatives", std::move(alts)}};
}

}  // namespace vulpath::ranker
