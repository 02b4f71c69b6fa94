#pragma once

#include <set>
#include <vector>

#include <json.hpp>

#include "vulpath/frontend/cpg.hpp"

namespace vulpath::slicer {

/// Source-to-sink chain of statement ids over forward DDG/CDG edges.
struct CandidatePath {
  std::vector<int> nodes;
  std::vector<int> lines;
  int sink = -1;

  friend bool operator==(const CandidatePath&, const CandidatePath&) = default;
};

struct PathLimits {
  int max_depth = 16;  // nodes per path
  int max_paths = 256;
};

/// Incoming DDG/CDG neighbours per statement id, ascending and unique.
std::vector<std::vector<int>> dependence_predecessors(const frontend::CodePropertyGraph& cpg);

/// Statements that reach `sink` over dependence edges, plus the sink.
/// Throws NotAStatement.
std::set<int> backward_slice(const frontend::CodePropertyGraph& cpg, int sink);

/// Simple dependence paths ending at `sink` whose first node has no incoming
/// dependence edge (self-loops aside). Backward DFS with predecessors taken in
/// ascending id order; paths longer than `max_depth` are dropped and the
/// search stops after `max_paths`. Throws NotAStatement.
std::vector<CandidatePath> enumerate_paths(const frontend::CodePropertyGraph& cpg, int sink,
                                           const PathLimits& limits = {});

/// `{"sink_line": int, "paths": [{"lines": [int]}]}`.
nlohmann::json path_report(const frontend::CodePropertyGraph& cpg, int sink, const std::vector<CandidatePath>& paths);

}  // namespace vulpath::slicer
