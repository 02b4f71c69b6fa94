#include <algorithm>
#include <set>

#include "vulpath/frontend/cpg.hpp"

namespace vulpath::frontend {
namespace {

class CfgBuilder {
 public:
  explicit CfgBuilder(const Ast& ast)
      : ast_(ast), entry_(static_cast<int>(ast.size())), exit_(entry_ + 1) {}

  Cfg build() {
    const AstNode& fn = ast_.root();
    std::vector<int> tail = visit(fn.children.at(1), {entry_});
    link(tail, exit_);

    Cfg cfg;
    cfg.entry = entry_;
    cfg.exit = exit_;
    for (const AstNode& n : ast_.nodes)
      if (n.is_statement) cfg.statements.push_back(n.id);
    for (auto [u, v] : edges_) cfg.edges.push_back({u, v, EdgeKind::CFG, {}});
    return cfg;
  }

 private:
  struct LoopFrame {
    std::vector<int> breaks;
    std::vector<int> continues;
  };

  void link(const std::vector<int>& preds, int to) {
    for (int p : preds) edges_.emplace(p, to);
  }

  static void append(std::vector<int>& into, const std::vector<int>& more) {
    for (int x : more)
      if (std::find(into.begin(), into.end(), x) == into.end()) into.push_back(x);
  }

  void apply_jumps(const AstNode& block, std::size_t position, std::vector<int>& preds) {
    for (auto [pos, is_break] : block.jumps) {
      if (static_cast<std::size_t>(pos) != position) continue;
      LoopFrame& frame = loops_.back();
      append(is_break ? frame.breaks : frame.continues, preds);
      preds.clear();
    }
  }

  // Wires `id` after `preds`; returns the nodes control falls out of.
  std::vector<int> visit(int id, std::vector<int> preds) {
    const AstNode& n = ast_.at(id);
    if (n.is_statement) {
      link(preds, id);
      if (n.kind == NodeKind::Return) {
        link({id}, exit_);
        return {};
      }
      return {id};
    }
    switch (n.kind) {
      case NodeKind::Block: {
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          apply_jumps(n, i, preds);
          preds = visit(n.children[i], std::move(preds));
        }
        apply_jumps(n, n.children.size(), preds);
        return preds;
      }
      case NodeKind::If:
        if (n.loop == LoopKind::While) return visit_while(n, std::move(preds));
        if (n.loop == LoopKind::DoWhile) return visit_do(n, std::move(preds));
        return visit_if(n, std::move(preds));
      default:
        return preds;
    }
  }

  std::vector<int> visit_if(const AstNode& n, std::vector<int> preds) {
    int cond = n.children.at(0);
    link(preds, cond);
    std::vector<int> out = visit(n.children.at(1), {cond});
    if (n.children.size() > 2) {
      const AstNode& els = ast_.at(n.children[2]);
      append(out, visit(els.children.at(0), {cond}));
    } else {
      append(out, {cond});
    }
    return out;
  }

  std::vector<int> visit_while(const AstNode& n, std::vector<int> preds) {
    int cond = n.children.at(0);
    link(preds, cond);
    loops_.emplace_back();
    std::vector<int> body_out = visit(n.children.at(1), {cond});
    append(body_out, loops_.back().continues);
    if (n.loop_step >= 0) body_out = visit(n.children.at(static_cast<std::size_t>(n.loop_step)), body_out);
    link(body_out, cond);
    std::vector<int> out = {cond};
    append(out, loops_.back().breaks);
    loops_.pop_back();
    return out;
  }

  std::vector<int> visit_do(const AstNode& n, std::vector<int> preds) {
    int cond = n.children.at(0);
    loops_.emplace_back();
    append(preds, {cond});  // back edge into the body
    std::vector<int> body_out = visit(n.children.at(1), preds);
    append(body_out, loops_.back().continues);
    link(body_out, cond);
    std::vector<int> out = {cond};
    append(out, loops_.back().breaks);
    loops_.pop_back();
    return out;
  }

  const Ast& ast_;
  int entry_;
  int exit_;
  std::set<std::pair<int, int>> edges_;
  std::vector<LoopFrame> loops_;
};

}  // namespace

Cfg build_cfg(const Ast& ast) { return CfgBuilder(ast).build(); }

FlowGraph Cfg::flow_graph() const {
  FlowGraph g;
  g.entry = entry;
  g.exit = exit;
  g.succ.resize(static_cast<std::size_t>(std::max(entry, exit)) + 1);
  g.nodes = statements;
  g.nodes.push_back(entry);
  g.nodes.push_back(exit);
  std::sort(g.nodes.begin(), g.nodes.end());
  for (const CpgEdge& e : edges) g.succ[static_cast<std::size_t>(e.src)].push_back(e.dst);
  for (auto& s : g.succ) std::sort(s.begin(), s.end());
  return g;
}

std::vector<CpgEdge> build_cdg(const FlowGraph& cfg, const std::vector<int>& ipdom) {
  std::vector<CpgEdge> out;
  for (auto [u, v] : control_dependences(cfg, ipdom)) out.push_back({u, v, EdgeKind::CDG, {}});
  return out;
}

std::vector<CpgEdge> build_ast_edges(const Ast& ast) {
  std::vector<CpgEdge> out;
  for (const AstNode& n : ast.nodes)
    for (int c : n.children) out.push_back({n.id, c, EdgeKind::AST, {}});
  return out;
}

}  // namespace vulpath::frontend
