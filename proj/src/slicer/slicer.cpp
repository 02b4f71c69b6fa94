#include <algorithm>

#include "vulpath/error.hpp"
#include "vulpath/slicer/slicer.hpp"

namespace vulpath::slicer {

using frontend::CodePropertyGraph;
using frontend::EdgeKind;

namespace {

void require_statement(const CodePropertyGraph& cpg, int id) {
  if (!cpg.contains(id) || !cpg.node(id).is_statement)
    throw NotAStatement("node " + std::to_string(id) + " is not a statement");
}

bool is_root(const std::vector<int>& preds, int id) {
  return std::all_of(preds.begin(), preds.end(), [id](int p) { return p == id; });
}

}  // namespace

std::vector<std::vector<int>> dependence_predecessors(const CodePropertyGraph& cpg) {
  int max_id = 0;
  for (const auto& n : cpg.nodes) max_id = std::max(max_id, n.id);
  std::vector<std::vector<int>> preds(static_cast<std::size_t>(max_id) + 1);
  for (const auto& e : cpg.edges)
    if (e.kind == EdgeKind::DDG || e.kind == EdgeKind::CDG) preds[static_cast<std::size_t>(e.dst)].push_back(e.src);
  for (auto& p : preds) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  return preds;
}

std::set<int> backward_slice(const CodePropertyGraph& cpg, int sink) {
  require_statement(cpg, sink);
  const auto preds = dependence_predecessors(cpg);
  std::set<int> seen{sink};
  std::vector<int> stack{sink};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int p : preds[static_cast<std::size_t>(v)])
      if (seen.insert(p).second) stack.push_back(p);
  }
  return seen;
}

std::vector<CandidatePath> enumerate_paths(const CodePropertyGraph& cpg, int sink, const PathLimits& limits) {
  require_statement(cpg, sink);
  const auto preds = dependence_predecessors(cpg);
  std::vector<CandidatePath> out;
  std::vector<int> chain{sink};  // sink first
  std::vector<char> on_chain(preds.size(), 0);
  on_chain[static_cast<std::size_t>(sink)] = 1;

  auto emit = [&] {
    CandidatePath p;
    p.nodes.assign(chain.rbegin(), chain.rend());
    for (int id : p.nodes) p.lines.push_back(cpg.node(id).line);
    p.sink = sink;
    out.push_back(std::move(p));
  };
  auto dfs = [&](auto&& self, int v) -> void {
    if (out.size() >= static_cast<std::size_t>(limits.max_paths)) return;
    const auto& ps = preds[static_cast<std::size_t>(v)];
    if (is_root(ps, v)) {
      emit();
      return;
    }
    if (chain.size() >= static_cast<std::size_t>(limits.max_depth)) return;
    for (int p : ps) {
      if (on_chain[static_cast<std::size_t>(p)]) continue;
      chain.push_back(p);
      on_chain[static_cast<std::size_t>(p)] = 1;
      self(self, p);
      on_chain[static_cast<std::size_t>(p)] = 0;
      chain.pop_back();
    }
  };
  if (limits.max_depth >= 1 && limits.max_paths >= 1) dfs(dfs, sink);
  return out;
}

nlohmann::json path_report(const CodePropertyGraph& cpg, int sink, const std::vector<CandidatePath>& paths) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : paths) list.push_back({{"lines", p.lines}});
  return {{"sink_line", cpg.node(sink).line}, {"paths", std::move(list)}};
}

}  // namespace vulpath::slicer
