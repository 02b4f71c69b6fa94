#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "oracles.hpp"
#include "vulpath/error.hpp"
#include "vulpath/frontend/cpg.hpp"
#include "vulpath/frontend/cpg_json.hpp"

using namespace vulpath;
using namespace vulpath::frontend;
using vulpath::oracle::example_source;

namespace {

int statement_at(const CodePropertyGraph& g, int line) {
  for (const auto& n : g.nodes)
    if (n.is_statement && n.line == line) return n.id;
  return -1;
}

bool has_edge(const CodePropertyGraph& g, EdgeKind kind, int src_line, int dst_line) {
  for (const auto& e : g.edges)
    if (e.kind == kind && g.node(e.src).line == src_line && g.node(e.dst).line == dst_line) return true;
  return false;
}

std::vector<int> cfg_successors(const CodePropertyGraph& g, int id) {
  std::vector<int> out;
  for (const auto& e : g.edges)
    if (e.kind == EdgeKind::CFG && e.src == id) out.push_back(e.dst);
  return out;
}

}  // namespace

TEST(Parser, MinimalFunction) {
  const Ast ast = parse_function("void f(){int x; x = 1;}");
  EXPECT_EQ(ast.function_name, "f");
  const auto& root = ast.root();
  EXPECT_EQ(root.kind, NodeKind::Function);
  const AstNode* block = nullptr;
  for (int c : root.children)
    if (ast.at(c).kind == NodeKind::Block) block = &ast.at(c);
  ASSERT_NE(block, nullptr);
  ASSERT_EQ(block->children.size(), 2u);
  EXPECT_EQ(ast.at(block->children[0]).kind, NodeKind::Decl);
  EXPECT_EQ(ast.at(block->children[1]).kind, NodeKind::Assign);
  EXPECT_EQ(ast.at(block->children[0]).line, 1);
  EXPECT_EQ(ast.at(block->children[1]).code, "x = 1");
}

TEST(Parser, TreeShapeAndLineSpan) {
  const Ast ast = parse_function(example_source());
  std::vector<int> parents(ast.size(), 0);
  for (const auto& n : ast.nodes) {
    EXPECT_EQ(n.id, &n - ast.nodes.data());
    EXPECT_GE(n.line, ast.first_line);
    EXPECT_LE(n.line, ast.last_line);
    for (int c : n.children) {
      EXPECT_GT(c, n.id);
      ++parents[static_cast<std::size_t>(c)];
    }
  }
  EXPECT_EQ(parents[0], 0);
  for (std::size_t i = 1; i < parents.size(); ++i) EXPECT_EQ(parents[i], 1) << "node " << i;
}

TEST(Parser, SyntaxErrorPointsAtSemicolon) {
  try {
    parse_function("void f(){x = ;}");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 14);
  }
}

TEST(Parser, GotoIsUnsupported) {
  try {
    parse_function("void f(){\n  goto out;\n}");
    FAIL() << "expected UnsupportedConstruct";
  } catch (const UnsupportedConstruct& e) {
    EXPECT_EQ(e.construct(), "goto");
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Cpg, ExampleHasNineStatementsOnePerLine) {
  const auto g = build_cpg(example_source());
  std::vector<int> lines;
  for (const auto& n : g.nodes)
    if (n.is_statement) lines.push_back(n.line);
  EXPECT_EQ(lines, (std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9}));
  EXPECT_EQ(g.node(statement_at(g, 4)).kind, NodeKind::Condition);
  EXPECT_EQ(g.node(statement_at(g, 8)).code, "memmove(data, source, 100*sizeof(int))");
}

TEST(Cpg, ExampleControlFlowDependenceEdges) {
  const auto g = build_cpg(example_source());
  EXPECT_TRUE(has_edge(g, EdgeKind::CFG, 4, 5));
  EXPECT_TRUE(has_edge(g, EdgeKind::CFG, 4, 6));
  EXPECT_EQ(cfg_successors(g, statement_at(g, 4)).size(), 2u);
  EXPECT_TRUE(has_edge(g, EdgeKind::CDG, 4, 5));
  EXPECT_TRUE(has_edge(g, EdgeKind::CDG, 4, 6));
  EXPECT_EQ(g.edges_of(EdgeKind::CDG).size(), 2u);
  EXPECT_TRUE(has_edge(g, EdgeKind::DDG, 2, 5));
  EXPECT_TRUE(has_edge(g, EdgeKind::DDG, 3, 6));
  for (int src : {5, 6, 7, 8}) EXPECT_TRUE(has_edge(g, EdgeKind::DDG, src, 9) || src == 7);
}

TEST(Cpg, StructuralInvariants) {
  for (const std::string src :
       {example_source(), std::string("void f(){int a = 1; int b; if (a) { b = a; } else { b = 2; } g(b); return;}"),
        std::string("int f(int n){int s = 0; for (int i = 0; i < n; i++) { s = s + i; } return s;}"),
        std::string("void f(char *p){while (*p) { p = p + 1; } do { q(p); } while (p); }")}) {
    const auto g = build_cpg(src);
    std::set<std::tuple<int, int, EdgeKind>> seen;
    for (const auto& e : g.edges) {
      EXPECT_TRUE(g.contains(e.src));
      EXPECT_TRUE(g.contains(e.dst));
      EXPECT_EQ(e.kind == EdgeKind::DDG, !e.var.empty());
      EXPECT_TRUE(seen.insert({e.src, e.dst, e.kind}).second || e.kind == EdgeKind::DDG);
    }
    // Statements are reachable from entry over CFG edges.
    std::set<int> reach{g.entry};
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& e : g.edges)
        if (e.kind == EdgeKind::CFG && reach.count(e.src) && reach.insert(e.dst).second) grew = true;
    }
    for (int s : g.statement_ids()) {
      EXPECT_TRUE(reach.count(s)) << s;
      const auto out = cfg_successors(g, s);
      if (g.node(s).kind == NodeKind::Condition)
        EXPECT_EQ(out.size(), 2u);
      else
        EXPECT_EQ(out.size(), 1u) << g.node(s).code;
    }
  }
}

TEST(Cpg, EmptyBodyIsEntryToExit) {
  const auto g = build_cpg("void f(){}");
  const auto cfg = g.edges_of(EdgeKind::CFG);
  ASSERT_EQ(cfg.size(), 1u);
  EXPECT_EQ(cfg[0].src, g.entry);
  EXPECT_EQ(cfg[0].dst, g.exit);
  EXPECT_EQ(g.node(g.entry).kind, NodeKind::Function);
  EXPECT_EQ(g.node(g.exit).line, 0);
}

TEST(Cfg, StraightLineChain) {
  const Ast ast = parse_function("void f(){a = 1; b = 2; c = 3;}");
  const Cfg cfg = build_cfg(ast);
  ASSERT_EQ(cfg.statements.size(), 3u);
  const int s1 = cfg.statements[0], s2 = cfg.statements[1], s3 = cfg.statements[2];
  std::vector<std::pair<int, int>> got;
  for (const auto& e : cfg.edges) got.emplace_back(e.src, e.dst);
  std::sort(got.begin(), got.end());
  std::vector<std::pair<int, int>> want{{cfg.entry, s1}, {s1, s2}, {s2, s3}, {s3, cfg.exit}};
  std::sort(want.begin(), want.end());
  EXPECT_EQ(got, want);
  EXPECT_TRUE(build_cdg(cfg.flow_graph(), post_dominators(cfg.flow_graph())).empty());
}

TEST(Cfg, IfElseDiamond) {
  const auto g = build_cpg("void f(int c){if (c) { a = 1; } else { b = 2; }}");
  int cond = -1;
  for (const auto& n : g.nodes)
    if (n.kind == NodeKind::Condition) cond = n.id;
  ASSERT_NE(cond, -1);
  EXPECT_EQ(cfg_successors(g, cond).size(), 2u);
  std::set<int> cdg;
  for (const auto& e : g.edges_of(EdgeKind::CDG)) {
    EXPECT_EQ(e.src, cond);
    cdg.insert(e.dst);
  }
  std::set<int> arms;
  for (const auto& n : g.nodes)
    if (n.kind == NodeKind::Assign) arms.insert(n.id);
  EXPECT_EQ(cdg, arms);
}

TEST(PostDominators, ChainAndDiamond) {
  FlowGraph chain{0, 3, {0, 1, 2, 3}, {{1}, {2}, {3}, {}}};
  const auto c = post_dominators(chain);
  EXPECT_EQ(c[0], 1);
  EXPECT_EQ(c[1], 2);
  EXPECT_EQ(c[2], 3);
  EXPECT_EQ(c[3], -1);
  FlowGraph diamond{0, 4, {0, 1, 2, 3, 4}, {{1, 2}, {3}, {3}, {4}, {}}};
  EXPECT_EQ(post_dominators(diamond)[0], 3);
}

TEST(PostDominators, UnreachableExitThrows) {
  FlowGraph g{0, 2, {0, 1, 2}, {{1, 2}, {1}, {}}};
  EXPECT_THROW(post_dominators(g), UnreachableExit);
}

TEST(PostDominators, MatchBruteForceOnRandomGraphs) {
  std::mt19937_64 rng(2024);
  for (int seed = 0; seed < 500; ++seed) {
    std::uniform_int_distribution<int> size(2, 10);
    const auto g = oracle::random_flow_graph(size(rng), rng);
    const auto ipdom = post_dominators(g);
    ASSERT_EQ(ipdom, oracle::brute_ipdom(g)) << "seed " << seed;
    ASSERT_EQ(control_dependences(g, ipdom), oracle::brute_control_dependences(g)) << "seed " << seed;
  }
}

TEST(ReachingDefinitions, SingleDefAndKill) {
  auto reaching_vars = [](const char* src, int target_line) {
    const Ast ast = parse_function(src);
    const Cfg cfg = build_cfg(ast);
    const auto du = extract_def_use(ast);
    const auto rd = reaching_definitions(cfg.flow_graph(), du);
    int target = -1;
    for (int s : cfg.statements)
      if (ast.at(s).line == target_line) target = s;
    std::vector<int> lines;
    for (int d : rd.in[static_cast<std::size_t>(target)]) lines.push_back(ast.at(rd.definitions[d].node).line);
    return lines;
  };
  EXPECT_EQ(reaching_vars("void f(){\nx = 1;\ny = x;\n}", 3), (std::vector<int>{2}));
  EXPECT_EQ(reaching_vars("void f(){\nx = 1;\nx = 2;\ny = x;\n}", 4), (std::vector<int>{3}));
  const auto both = reaching_vars("void f(int c){\nif (c) {\nx = 1;\n} else {\nx = 2;\n}\ny = x;\n}", 7);
  EXPECT_EQ(std::set<int>(both.begin(), both.end()), (std::set<int>{3, 5}));
}

TEST(Ddg, EdgesMatchDefUseAndReachability) {
  for (const std::string src :
       {example_source(), std::string("void f(){x = 1; y = 2; z = y;}"),
        std::string("int f(int n){int s = 0; int i; for (i = 0; i < n; i++) { s = s + i; } return s;}")}) {
    const Ast ast = parse_function(src);
    const Cfg cfg = build_cfg(ast);
    const auto du = extract_def_use(ast);
    const auto rd = reaching_definitions(cfg.flow_graph(), du);
    for (const auto& e : build_ddg(rd, du)) {
      const auto& d = du.at(e.src);
      const auto& u = du.at(e.dst);
      const bool defined =
          std::count(d.defs.begin(), d.defs.end(), e.var) || std::count(d.may_defs.begin(), d.may_defs.end(), e.var);
      EXPECT_TRUE(defined) << e.var;
      EXPECT_TRUE(std::count(u.uses.begin(), u.uses.end(), e.var)) << e.var;
      bool reaches = false;
      for (int i : rd.in[static_cast<std::size_t>(e.dst)])
        reaches = reaches || (rd.definitions[i].node == e.src && rd.definitions[i].var == e.var);
      EXPECT_TRUE(reaches);
    }
  }
}

TEST(Ddg, OnlyUsedDefinitionsHaveEdges) {
  const auto g = build_cpg("void f(){x = 1; y = 2; z = y;}");
  const auto ddg = g.edges_of(EdgeKind::DDG);
  ASSERT_EQ(ddg.size(), 1u);
  EXPECT_EQ(ddg[0].var, "y");
}

TEST(Cpg, ComposesSubBuilders) {
  std::mt19937_64 rng(5);
  const char* vars[] = {"a", "b", "c", "d"};
  for (int t = 0; t < 30; ++t) {
    std::string src = "void f(){\n";
    std::uniform_int_distribution<int> v(0, 3), len(1, 8);
    for (int i = len(rng); i > 0; --i)
      src += std::string(vars[v(rng)]) + " = " + vars[v(rng)] + " + " + vars[v(rng)] + ";\n";
    src += "}\n";
    const Ast ast = parse_function(src);
    const Cfg cfg = build_cfg(ast);
    const auto fg = cfg.flow_graph();
    const auto du = extract_def_use(ast);
    const auto composed =
        assemble_cpg(ast, cfg, build_cdg(fg, post_dominators(fg)), build_ddg(reaching_definitions(fg, du), du));
    EXPECT_EQ(build_cpg(src), composed);
  }
}

TEST(CpgJson, ExampleExport) {
  const auto doc = cpg_to_json(build_cpg(example_source()));
  int statements = 0;
  for (const auto& n : doc.at("nodes")) statements += n.at("is_statement").get<bool>() ? 1 : 0;
  EXPECT_EQ(statements, 9);
}

TEST(CpgJson, RoundTripRandomGraphs) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    std::uniform_int_distribution<int> size(1, 14);
    const auto g = oracle::random_cpg(size(rng), rng);
    EXPECT_EQ(cpg_from_json(cpg_to_json(g)), g);
  }
  const auto f = build_cpg(example_source());
  EXPECT_EQ(cpg_from_json(nlohmann::json::parse(cpg_to_json(f).dump())), f);
}

TEST(CpgJson, MissingEdgesIsSchemaError) {
  auto doc = cpg_to_json(build_cpg("void f(){x = 1;}"));
  doc.erase("edges");
  try {
    cpg_from_json(doc);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "$.edges");
  }
}
