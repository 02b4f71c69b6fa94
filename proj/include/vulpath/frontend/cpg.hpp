#pragma once

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vulpath/frontend/ast.hpp"
#include "vulpath/frontend/dominators.hpp"

namespace vulpath::frontend {

enum class EdgeKind : std::uint8_t { AST, CFG, CDG, DDG };

std::string_view to_string(EdgeKind kind);
std::optional<EdgeKind> edge_kind_from_string(std::string_view name);

struct CpgNode {
  int id = 0;
  NodeKind kind = NodeKind::Function;
  std::string code;
  int line = 0;
  bool is_statement = false;

  friend bool operator==(const CpgNode&, const CpgNode&) = default;
};

struct CpgEdge {
  int src = 0;
  int dst = 0;
  EdgeKind kind = EdgeKind::AST;
  std::string var;  // nonempty iff kind == DDG

  friend auto operator<=>(const CpgEdge&, const CpgEdge&) = default;
};

/// Unified AST/CFG/CDG/DDG multigraph of one function. Immutable once
/// `finalize()` has run: nodes sorted by id, edges sorted and unique.
class CodePropertyGraph {
 public:
  std::string function_name;
  std::vector<CpgNode> nodes;
  std::vector<CpgEdge> edges;
  int entry = -1;
  int exit = -1;

  /// Sorts nodes and edges, drops duplicate edges and rebuilds the id index.
  void finalize();

  std::size_t size() const { return nodes.size(); }
  bool contains(int id) const { return index_.count(id) != 0; }
  /// Position of node `id` in `nodes` (row index for feature matrices).
  std::size_t index_of(int id) const;
  const CpgNode& node(int id) const { return nodes[index_of(id)]; }

  /// Statement node ids in ascending order (virtual entry/exit excluded).
  std::vector<int> statement_ids() const;
  std::vector<CpgEdge> edges_of(EdgeKind kind) const;

  /// Structural equality: same function, entry/exit, nodes and edges.
  friend bool operator==(const CodePropertyGraph& a, const CodePropertyGraph& b) {
    return a.function_name == b.function_name && a.entry == b.entry && a.exit == b.exit &&
           a.nodes == b.nodes && a.edges == b.edges;
  }

 private:
  std::unordered_map<int, std::size_t> index_;
};

/// Statement-level control flow of a parsed function. The virtual entry and
/// exit ids are `ast.size()` and `ast.size() + 1`.
struct Cfg {
  int entry = -1;
  int exit = -1;
  std::vector<int> statements;  // statement node ids, ascending
  std::vector<CpgEdge> edges;   // kind CFG

  FlowGraph flow_graph() const;
};

struct DefUse {
  std::vector<std::string> defs;      // strong definitions (kill earlier ones)
  std::vector<std::string> may_defs;  // may-definitions (no kill)
  std::vector<std::string> uses;
};

struct Definition {
  int node = 0;
  std::string var;
  bool kills = true;
};

struct ReachingDefinitions {
  std::vector<Definition> definitions;
  // Indexed by node id; each entry lists indices into `definitions`, sorted.
  std::vector<std::vector<int>> in;
  std::vector<std::vector<int>> out;
};

std::vector<CpgEdge> build_ast_edges(const Ast& ast);
Cfg build_cfg(const Ast& ast);
std::vector<CpgEdge> build_cdg(const FlowGraph& cfg, const std::vector<int>& ipdom);

/// Def/use sets per statement node, keyed by node id.
std::map<int, DefUse> extract_def_use(const Ast& ast);
ReachingDefinitions reaching_definitions(const FlowGraph& cfg, const std::map<int, DefUse>& def_use);
std::vector<CpgEdge> build_ddg(const ReachingDefinitions& rd, const std::map<int, DefUse>& def_use);

/// Assembles the CPG from already-built pieces.
CodePropertyGraph assemble_cpg(const Ast& ast, const Cfg& cfg, std::vector<CpgEdge> cdg,
                               std::vector<CpgEdge> ddg);
CodePropertyGraph build_cpg(std::string_view source);

}  // namespace vulpath::frontend
