#include <algorithm>
#include <cstdint>
#include <set>

#include "vulpath/frontend/cpg.hpp"

namespace vulpath::frontend {
namespace {

bool is_inc_dec(const AstNode& n) {
  if (n.kind != NodeKind::UnaryOp && n.kind != NodeKind::Assign) return false;
  if (n.children.size() != 1) return false;
  return n.code.starts_with("++") || n.code.starts_with("--") || n.code.ends_with("++") ||
         n.code.ends_with("--");
}

class DefUseCollector {
 public:
  DefUseCollector(const Ast& ast)
      : ast_(ast), pointer_like_(ast.pointer_like.begin(), ast.pointer_like.end()) {}

  DefUse collect(int stmt) {
    defs_.clear();
    may_defs_.clear();
    uses_.clear();
    const AstNode& s = ast_.at(stmt);
    if (s.kind == NodeKind::Decl) {
      for (int c : s.children) {
        const AstNode& k = ast_.at(c);
        if (k.kind == NodeKind::Identifier && k.declarator) {
          defs_.insert(k.code);
        } else {
          expr(c);
        }
      }
    } else {
      expr(stmt);
    }
    DefUse du;
    du.defs.assign(defs_.begin(), defs_.end());
    for (const auto& v : may_defs_)
      if (!defs_.count(v)) du.may_defs.push_back(v);
    du.uses.assign(uses_.begin(), uses_.end());
    return du;
  }

 private:
  // Leftmost variable of an lvalue-ish expression (`a` in `a[i].f`).
  std::string base_var(int id) const {
    const AstNode& n = ast_.at(id);
    if (n.kind == NodeKind::Identifier) return n.code;
    if (n.children.empty()) return {};
    return base_var(n.children.front());
  }

  void write_target(int id, bool also_read) {
    const AstNode& n = ast_.at(id);
    switch (n.kind) {
      case NodeKind::Identifier:
        defs_.insert(n.code);
        if (also_read) uses_.insert(n.code);
        return;
      case NodeKind::PointerDeref: {
        std::string base = base_var(n.children.front());
        if (!base.empty()) {
          defs_.insert("*" + base);
          if (also_read) uses_.insert("*" + base);
        }
        expr(n.children.front());
        return;
      }
      case NodeKind::ArraySubscript: {
        std::string base = base_var(id);
        if (!base.empty()) may_defs_.insert(base);
        for (int c : n.children) expr(c);
        return;
      }
      case NodeKind::UnaryOp: {
        // Member write `s.f`: may-define the aggregate.
        std::string base = base_var(id);
        if (!base.empty() && n.code.find('.') != std::string::npos) {
          may_defs_.insert(base);
          for (int c : n.children) expr(c);
          return;
        }
        expr(id);
        return;
      }
      default:
        expr(id);
    }
  }

  static bool is_compound(const AstNode& assign, const AstNode& lhs) {
    std::string_view rest(assign.code);
    rest.remove_prefix(std::min(rest.size(), lhs.code.size()));
    auto eq = rest.find('=');
    if (eq == std::string_view::npos) return false;
    for (std::size_t i = 0; i < eq; ++i)
      if (rest[i] != ' ' && rest[i] != '\t' && rest[i] != '\n') return true;
    return false;
  }

  void expr(int id) {
    const AstNode& n = ast_.at(id);
    if (is_inc_dec(n)) {
      write_target(n.children.front(), true);
      return;
    }
    switch (n.kind) {
      case NodeKind::Identifier:
        if (!n.declarator) uses_.insert(n.code);
        return;
      case NodeKind::Assign: {
        const AstNode& lhs = ast_.at(n.children.at(0));
        write_target(lhs.id, is_compound(n, lhs));
        expr(n.children.at(1));
        return;
      }
      case NodeKind::Call: {
        const AstNode& callee = ast_.at(n.children.at(0));
        if (callee.kind != NodeKind::Identifier) expr(callee.id);
        if (n.children.size() > 1) {
          for (int a : ast_.at(n.children[1]).children) {
            const AstNode& arg = ast_.at(a);
            if (arg.kind == NodeKind::Identifier && pointer_like_.count(arg.code)) {
              may_defs_.insert(arg.code);
            } else if (arg.kind == NodeKind::UnaryOp && arg.code.starts_with("&") &&
                       arg.children.size() == 1) {
              std::string base = base_var(arg.children.front());
              if (!base.empty()) may_defs_.insert(base);
            }
            expr(a);
          }
        }
        return;
      }
      case NodeKind::PointerDeref: {
        std::string base = base_var(n.children.front());
        if (!base.empty()) uses_.insert("*" + base);
        expr(n.children.front());
        return;
      }
      default:
        for (int c : n.children) expr(c);
    }
  }

  const Ast& ast_;
  std::set<std::string> pointer_like_;
  std::set<std::string> defs_;
  std::set<std::string> may_defs_;
  std::set<std::string> uses_;
};

using Bits = std::vector<std::uint64_t>;

void set_bit(Bits& b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }
bool test_bit(const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1U; }

std::vector<int> bits_to_list(const Bits& b, std::size_t n) {
  std::vector<int> out;
  for (std::size_t i = 0; i < n; ++i)
    if (test_bit(b, i)) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace

std::map<int, DefUse> extract_def_use(const Ast& ast) {
  DefUseCollector collector(ast);
  std::map<int, DefUse> out;
  for (const AstNode& n : ast.nodes)
    if (n.is_statement) out.emplace(n.id, collector.collect(n.id));
  return out;
}

ReachingDefinitions reaching_definitions(const FlowGraph& cfg, const std::map<int, DefUse>& def_use) {
  ReachingDefinitions rd;
  const std::size_t n = cfg.size();
  for (const auto& [node, du] : def_use) {
    for (const auto& v : du.defs) rd.definitions.push_back({node, v, true});
    for (const auto& v : du.may_defs) rd.definitions.push_back({node, v, false});
  }
  const std::size_t num_defs = rd.definitions.size();
  const std::size_t words = (num_defs + 63) / 64;

  std::vector<Bits> gen(n, Bits(words, 0)), kill(n, Bits(words, 0));
  for (std::size_t d = 0; d < num_defs; ++d) {
    const Definition& def = rd.definitions[d];
    set_bit(gen[static_cast<std::size_t>(def.node)], d);
  }
  for (const auto& [node, du] : def_use) {
    for (std::size_t d = 0; d < num_defs; ++d) {
      const Definition& def = rd.definitions[d];
      if (std::find(du.defs.begin(), du.defs.end(), def.var) != du.defs.end())
        set_bit(kill[static_cast<std::size_t>(node)], d);
    }
  }

  // Reverse postorder from entry for fast convergence.
  std::vector<int> order;
  {
    std::vector<char> seen(n, 0);
    std::vector<std::pair<int, std::size_t>> stack{{cfg.entry, 0}};
    seen[static_cast<std::size_t>(cfg.entry)] = 1;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      const auto& ss = cfg.succ[static_cast<std::size_t>(v)];
      if (i < ss.size()) {
        int w = ss[i++];
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
    std::reverse(order.begin(), order.end());
    // Nodes unreachable from entry still get a (empty-input) solution.
    for (int v : cfg.nodes)
      if (!seen[static_cast<std::size_t>(v)]) order.push_back(v);
  }

  const auto pred = cfg.predecessors();
  std::vector<Bits> in(n, Bits(words, 0)), out(n, Bits(words, 0));
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v : order) {
      const auto vi = static_cast<std::size_t>(v);
      Bits new_in(words, 0);
      for (int p : pred[vi])
        for (std::size_t w = 0; w < words; ++w) new_in[w] |= out[static_cast<std::size_t>(p)][w];
      Bits new_out(words, 0);
      for (std::size_t w = 0; w < words; ++w) new_out[w] = gen[vi][w] | (new_in[w] & ~kill[vi][w]);
      if (new_out != out[vi] || new_in != in[vi]) {
        in[vi] = std::move(new_in);
        out[vi] = std::move(new_out);
        changed = true;
      }
    }
  }

  rd.in.resize(n);
  rd.out.resize(n);
  for (int v : cfg.nodes) {
    rd.in[static_cast<std::size_t>(v)] = bits_to_list(in[static_cast<std::size_t>(v)], num_defs);
    rd.out[static_cast<std::size_t>(v)] = bits_to_list(out[static_cast<std::size_t>(v)], num_defs);
  }
  return rd;
}

std::vector<CpgEdge> build_ddg(const ReachingDefinitions& rd, const std::map<int, DefUse>& def_use) {
  std::set<CpgEdge> edges;
  for (const auto& [node, du] : def_use) {
    if (static_cast<std::size_t>(node) >= rd.in.size()) continue;
    for (int d : rd.in[static_cast<std::size_t>(node)]) {
      const Definition& def = rd.definitions[static_cast<std::size_t>(d)];
      if (std::binary_search(du.uses.begin(), du.uses.end(), def.var))
        edges.insert({def.node, node, EdgeKind::DDG, def.var});
    }
  }
  return {edges.begin(), edges.end()};
}

}  // namespace vulpath::frontend
