#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "vulpath/error.hpp"

namespace vulpath::frontend {

/// Directed graph over dense ids [0, n). Only ids listed in `nodes`
/// participate; the rest (e.g. expression nodes of a CPG) are ignored.
struct FlowGraph {
  int entry = -1;
  int exit = -1;
  std::vector<int> nodes;
  std::vector<std::vector<int>> succ;  // indexed by id, size n

  std::size_t size() const { return succ.size(); }

  std::vector<std::vector<int>> predecessors() const {
    std::vector<std::vector<int>> pred(succ.size());
    for (int u : nodes)
      for (int v : succ[static_cast<std::size_t>(u)]) pred[static_cast<std::size_t>(v)].push_back(u);
    return pred;
  }
};

/// Immediate post-dominators (Cooper-Harvey-Kennedy iteration on the reverse
/// graph). Result is indexed by id; the exit and non-participating ids map to
/// -1. Throws UnreachableExit when some participating node cannot reach exit.
inline std::vector<int> post_dominators(const FlowGraph& g) {
  const std::size_t n = g.size();
  const auto pred = g.predecessors();

  // Postorder of the reverse graph rooted at exit.
  std::vector<int> order;
  std::vector<int> rank(n, -1);
  std::vector<char> seen(n, 0);
  std::vector<std::pair<int, std::size_t>> stack;
  stack.emplace_back(g.exit, 0);
  seen[static_cast<std::size_t>(g.exit)] = 1;
  while (!stack.empty()) {
    auto& [v, i] = stack.back();
    const auto& ps = pred[static_cast<std::size_t>(v)];
    if (i < ps.size()) {
      int w = ps[i++];
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        stack.emplace_back(w, 0);
      }
    } else {
      rank[static_cast<std::size_t>(v)] = static_cast<int>(order.size());
      order.push_back(v);
      stack.pop_back();
    }
  }

  std::vector<int> unreachable;
  for (int v : g.nodes)
    if (!seen[static_cast<std::size_t>(v)]) unreachable.push_back(v);
  if (!unreachable.empty()) {
    std::sort(unreachable.begin(), unreachable.end());
    throw UnreachableExit(std::move(unreachable));
  }

  std::vector<int> ipdom(n, -1);
  ipdom[static_cast<std::size_t>(g.exit)] = g.exit;
  auto intersect = [&](int a, int b) {
    while (a != b) {
      while (rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)])
        a = ipdom[static_cast<std::size_t>(a)];
      while (rank[static_cast<std::size_t>(b)] < rank[static_cast<std::size_t>(a)])
        b = ipdom[static_cast<std::size_t>(b)];
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    // Reverse postorder of the reverse graph, skipping exit.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      int v = *it;
      if (v == g.exit) continue;
      int best = -1;
      for (int s : g.succ[static_cast<std::size_t>(v)]) {
        if (ipdom[static_cast<std::size_t>(s)] == -1) continue;
        best = best == -1 ? s : intersect(s, best);
      }
      if (best != ipdom[static_cast<std::size_t>(v)]) {
        ipdom[static_cast<std::size_t>(v)] = best;
        changed = true;
      }
    }
  }
  ipdom[static_cast<std::size_t>(g.exit)] = -1;
  return ipdom;
}

/// Control dependences (Ferrante-Ottenstein-Warren): for each edge u->v,
/// every node on the post-dominator tree path from v up to (excluding)
/// ipdom(u) is control dependent on u. Returns (controller, dependent) pairs,
/// sorted and unique. Dependences on `g.entry` are dropped.
inline std::vector<std::pair<int, int>> control_dependences(const FlowGraph& g,
                                                            const std::vector<int>& ipdom) {
  std::vector<std::pair<int, int>> out;
  for (int u : g.nodes) {
    if (u == g.entry) continue;
    int stop = ipdom[static_cast<std::size_t>(u)];
    for (int v : g.succ[static_cast<std::size_t>(u)]) {
      for (int r = v; r != stop && r != -1 && r != g.exit; r = ipdom[static_cast<std::size_t>(r)]) {
        out.emplace_back(u, r);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace vulpath::frontend
