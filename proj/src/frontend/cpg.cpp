#include <algorithm>
#include <array>
#include <stdexcept>

#include "vulpath/frontend/cpg.hpp"

namespace vulpath::frontend {

namespace {
constexpr std::array<std::string_view, 4> kEdgeNames = {"AST", "CFG", "CDG", "DDG"};
}

std::string_view to_string(EdgeKind kind) { return kEdgeNames[static_cast<std::size_t>(kind)]; }

std::optional<EdgeKind> edge_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kEdgeNames.size(); ++i)
    if (kEdgeNames[i] == name) return static_cast<EdgeKind>(i);
  return std::nullopt;
}

void CodePropertyGraph::finalize() {
  std::sort(nodes.begin(), nodes.end(), [](const CpgNode& a, const CpgNode& b) { return a.id < b.id; });
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  index_.clear();
  for (std::size_t i = 0; i < nodes.size(); ++i) index_.emplace(nodes[i].id, i);
}

std::size_t CodePropertyGraph::index_of(int id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("no CPG node with id " + std::to_string(id));
  return it->second;
}

std::vector<int> CodePropertyGraph::statement_ids() const {
  std::vector<int> out;
  for (const CpgNode& n : nodes)
    if (n.is_statement) out.push_back(n.id);
  return out;
}

std::vector<CpgEdge> CodePropertyGraph::edges_of(EdgeKind kind) const {
  std::vector<CpgEdge> out;
  for (const CpgEdge& e : edges)
    if (e.kind == kind) out.push_back(e);
  return out;
}

CodePropertyGraph assemble_cpg(const Ast& ast, const Cfg& cfg, std::vector<CpgEdge> cdg,
                               std::vector<CpgEdge> ddg) {
  CodePropertyGraph g;
  g.function_name = ast.function_name;
  g.entry = cfg.entry;
  g.exit = cfg.exit;
  g.nodes.reserve(ast.size() + 2);
  for (const AstNode& n : ast.nodes) g.nodes.push_back({n.id, n.kind, n.code, n.line, n.is_statement});
  g.nodes.push_back({cfg.entry, NodeKind::Function, "ENTRY", 0, false});
  g.nodes.push_back({cfg.exit, NodeKind::Function, "EXIT", 0, false});
  g.edges = build_ast_edges(ast);
  g.edges.insert(g.edges.end(), cfg.edges.begin(), cfg.edges.end());
  g.edges.insert(g.edges.end(), std::make_move_iterator(cdg.begin()), std::make_move_iterator(cdg.end()));
  g.edges.insert(g.edges.end(), std::make_move_iterator(ddg.begin()), std::make_move_iterator(ddg.end()));
  g.finalize();
  return g;
}

CodePropertyGraph build_cpg(std::string_view source) {
  Ast ast = parse_function(source);
  Cfg cfg = build_cfg(ast);
  FlowGraph fg = cfg.flow_graph();
  std::vector<int> ipdom = post_dominators(fg);
  auto du = extract_def_use(ast);
  auto rd = reaching_definitions(fg, du);
  return assemble_cpg(ast, cfg, build_cdg(fg, ipdom), build_ddg(rd, du));
}

}  // namespace vulpath::frontend
