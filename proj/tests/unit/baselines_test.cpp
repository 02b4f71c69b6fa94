#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vulpath/baselines/edge_mask.hpp"
#include "vulpath/baselines/rules.hpp"

using namespace vulpath;
using namespace vulpath::baselines;

namespace {

std::vector<SinkRule> rules_on_line(const std::vector<SinkRuleHit>& hits, int line) {
  std::vector<SinkRule> out;
  for (const auto& h : hits)
    if (h.line == line) out.push_back(h.rule);
  return out;
}

bool contains(const std::vector<SinkRule>& v, SinkRule r) { return std::find(v.begin(), v.end(), r) != v.end(); }

}  // namespace

TEST(Rules, ExampleApiCallAtLine8) {
  const auto g = frontend::build_cpg(oracle::example_source());
  const auto hits = rule_based_sinks(g);
  EXPECT_TRUE(contains(rules_on_line(hits, 8), SinkRule::ApiCall));
  EXPECT_TRUE(contains(rules_on_line(hits, 8), SinkRule::Arithmetic));
  EXPECT_TRUE(contains(rules_on_line(hits, 2), SinkRule::ApiCall));  // ALLOCA, case-insensitive
  EXPECT_TRUE(contains(rules_on_line(hits, 9), SinkRule::ArrayUsage));
  for (const auto& h : hits) {
    ASSERT_TRUE(g.contains(h.node));
    const auto kind = g.node(h.node).kind;
    switch (h.rule) {
      case SinkRule::ApiCall:
        EXPECT_EQ(kind, frontend::NodeKind::Call);
        break;
      case SinkRule::ArrayUsage:
        EXPECT_EQ(kind, frontend::NodeKind::ArraySubscript);
        break;
      case SinkRule::PointerUsage:
        EXPECT_EQ(kind, frontend::NodeKind::PointerDeref);
        break;
      case SinkRule::Arithmetic:
        EXPECT_EQ(kind, frontend::NodeKind::BinaryOp);
        break;
    }
    EXPECT_EQ(h.line, g.node(h.node).line);
  }
  EXPECT_EQ(hits, rule_based_sinks(g));
  std::vector<int> lines;
  for (int s : rule_sink_statements(g, hits)) lines.push_back(g.node(s).line);
  EXPECT_EQ(lines, (std::vector<int>{2, 3, 8, 9}));
}

TEST(Rules, SmallCases) {
  const auto a = rule_based_sinks(frontend::build_cpg("void f(int *a, int i){a[i] = 0; *a = i;}"));
  EXPECT_TRUE(contains(rules_on_line(a, 1), SinkRule::ArrayUsage));
  EXPECT_TRUE(contains(rules_on_line(a, 1), SinkRule::PointerUsage));
  EXPECT_TRUE(rule_based_sinks(frontend::build_cpg("void f(){int x = 1; x = 2;}")).empty());
  // Arithmetic outside an argument or index does not fire; a comparison never does.
  EXPECT_TRUE(rule_based_sinks(frontend::build_cpg("void f(int n){int x = n + 1; g(x < n);}")).empty());
  const auto idx = rule_based_sinks(frontend::build_cpg("void f(int *a, int n){a[n - 1] = 0;}"));
  EXPECT_TRUE(contains(rules_on_line(idx, 1), SinkRule::Arithmetic));
  RuleConfig none{{}};
  EXPECT_TRUE(rule_based_sinks(frontend::build_cpg("void f(){memcpy(a, b, c);}"), none).empty());
}

TEST(Rules, Helpers) {
  EXPECT_EQ(callee_name("memmove(data, source, 100*sizeof(int))"), "memmove");
  EXPECT_EQ(callee_name("ALLOCA(50*sizeof(int))"), "ALLOCA");
  EXPECT_EQ(callee_name("data[0]"), "");
  EXPECT_EQ(binary_operator("(a+b)*c"), "*");
  EXPECT_EQ(binary_operator("a - -b"), "-");
  EXPECT_EQ(binary_operator("x << 2"), "<<");
  EXPECT_EQ(binary_operator("f(a+b)"), "");
  const auto g = frontend::build_cpg(oracle::example_source());
  for (const auto& n : g.nodes) {
    const int s = enclosing_statement(g, n.id);
    if (n.line > 0 && n.kind != frontend::NodeKind::Function && n.kind != frontend::NodeKind::Block &&
        n.kind != frontend::NodeKind::Else && n.kind != frontend::NodeKind::ParamList &&
        n.kind != frontend::NodeKind::Param && n.kind != frontend::NodeKind::If) {
      ASSERT_NE(s, -1) << n.code;
      EXPECT_TRUE(g.node(s).is_statement);
      EXPECT_EQ(g.node(s).line, n.line);
    }
  }
}

namespace {

struct MaskFixture {
  frontend::CodePropertyGraph g = frontend::build_cpg(oracle::example_source());
  nn::DetectorModel det = nn::DetectorModel::create({}, 3);
  nn::Matrix x;
  MaskFixture() {
    std::mt19937_64 rng(5);
    x = oracle::random_matrix(static_cast<Eigen::Index>(g.size()), 128, rng);
  }
  std::size_t edges() const {
    return g.edges_of(frontend::EdgeKind::DDG).size() + g.edges_of(frontend::EdgeKind::CDG).size();
  }
};

}  // namespace

TEST(EdgeMask, FullMaskIsOriginalGraph) {
  MaskFixture f;
  const std::vector<double> ones(f.edges(), 1.0);
  const nn::Matrix a = masked_adjacency(f.g, ones);
  const Eigen::VectorXd r = a.rowwise().sum().cwiseSqrt().cwiseInverse();
  const nn::Matrix s = r.asDiagonal() * a * r.asDiagonal();
  EXPECT_LE((s - nn::normalized_adjacency(f.g)).cwiseAbs().maxCoeff(), 1e-12);
  const std::vector<double> zeros(f.edges(), 0.0);
  const nn::Matrix z = masked_adjacency(f.g, zeros);
  // Dependence-only pairs vanish; AST and CFG pairs stay.
  for (const auto& e : f.g.edges) {
    const auto i = static_cast<Eigen::Index>(f.g.index_of(e.src)), j = static_cast<Eigen::Index>(f.g.index_of(e.dst));
    if (e.kind == frontend::EdgeKind::AST || e.kind == frontend::EdgeKind::CFG) EXPECT_EQ(z(i, j), 1.0);
  }
  EXPECT_LT(z.sum(), a.sum());
  const auto obj = edge_mask_objective(f.g, f.x, f.det, ones, 0.3, 0.0);
  EXPECT_NEAR(obj.probability, nn::detector_forward(f.g, f.x, f.det), 1e-12);
}

TEST(EdgeMask, ObjectiveGradientMatchesFiniteDifferences) {
  MaskFixture f;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<double> m(f.edges());
  for (auto& v : m) v = u(rng);
  const auto obj = edge_mask_objective(f.g, f.x, f.det, m, 0.8, 0.05);
  ASSERT_EQ(obj.gradient.size(), m.size());
  double worst = 0, scale = 1e-7;
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto a = m, b = m;
    a[i] += 1e-6;
    b[i] -= 1e-6;
    const double num = (edge_mask_objective(f.g, f.x, f.det, a, 0.8, 0.05).loss -
                        edge_mask_objective(f.g, f.x, f.det, b, 0.8, 0.05).loss) /
                       2e-6;
    worst = std::max(worst, std::abs(num - obj.gradient[i]));
    scale = std::max({scale, std::abs(num), std::abs(obj.gradient[i])});
  }
  EXPECT_LE(worst / scale, 1e-4);
}

TEST(EdgeMask, ExplainProperties) {
  MaskFixture f;
  const auto r = edge_mask_explain(f.g, f.x, f.det);
  EXPECT_LE(r.lines.size(), 10u);
  EXPECT_EQ(r.edges.size(), f.edges());
  for (std::size_t i = 0; i < r.edges.size(); ++i) {
    EXPECT_GE(r.edges[i].mask, 0.0);
    EXPECT_LE(r.edges[i].mask, 1.0);
    if (i > 0) EXPECT_GE(r.edges[i - 1].mask, r.edges[i].mask);
  }
  const auto again = edge_mask_explain(f.g, f.x, f.det);
  EXPECT_EQ(again.lines, r.lines);

  EdgeMaskConfig heavy;
  heavy.lambda = 1e3;
  heavy.top_k = 3;
  const auto h = edge_mask_explain(f.g, f.x, f.det, heavy);
  EXPECT_LE(h.lines.size(), 3u);
  for (const auto& e : h.edges) EXPECT_LE(e.mask, 1e-6);

  EdgeMaskConfig free;
  free.lambda = 0;
  free.steps = 2000;
  const auto z = edge_mask_explain(f.g, f.x, f.det, free);
  EXPECT_LE(std::abs(z.masked_probability - z.original_probability), 0.05);
}
