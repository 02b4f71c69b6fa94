#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "vulpath/error.hpp"
#include "vulpath/nn/adam.hpp"
#include "vulpath/nn/checkpoint.hpp"
#include "vulpath/nn/gradcheck.hpp"
#include "vulpath/nn/graph_batch.hpp"
#include "vulpath/nn/loss.hpp"
#include "vulpath/nn/models.hpp"
#include "vulpath/nn/train.hpp"

using namespace vulpath;
using namespace vulpath::nn;
using oracle::random_matrix;

namespace {

frontend::CodePropertyGraph two_nodes() {
  frontend::CodePropertyGraph g;
  g.nodes.push_back({0, frontend::NodeKind::Assign, "a = 1", 1, true});
  g.nodes.push_back({1, frontend::NodeKind::Assign, "b = a", 2, true});
  g.edges.push_back({0, 1, frontend::EdgeKind::CFG, ""});
  g.finalize();
  return g;
}

SinkModelConfig small_sink() { return {6, 5, 4, 0.5}; }
DetectorConfig small_detector() { return {6, 5, 3, 0.0}; }

GraphSample labeled_sample(const frontend::CodePropertyGraph& g, std::mt19937_64& rng, int in_dim) {
  std::vector<int> labels(g.size());
  std::bernoulli_distribution coin(0.3);
  for (auto& l : labels) l = coin(rng) ? 1 : 0;
  labels[0] = 1;
  labels[1] = 0;
  return make_sample(g, random_matrix(static_cast<Eigen::Index>(g.size()), in_dim, rng), labels, 1);
}

}  // namespace

TEST(Adjacency, HandExamples) {
  frontend::CodePropertyGraph one;
  one.nodes.push_back({0, frontend::NodeKind::Assign, "a = 1", 1, true});
  one.finalize();
  EXPECT_EQ(normalized_adjacency(one), Matrix::Ones(1, 1));
  const Matrix two = normalized_adjacency(two_nodes());
  EXPECT_TRUE(two.isApprox(Matrix::Constant(2, 2, 0.5), 1e-15));
}

TEST(Adjacency, SymmetricAndMatchesDenseOracle) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto g = oracle::random_cpg(1 + t % 16, rng);
    const Matrix s = normalized_adjacency(g);
    EXPECT_TRUE(s.allFinite());
    EXPECT_LE((s - s.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((s - oracle::dense_normalized_adjacency(g)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((Matrix(normalized_adjacency_sparse(g)) - s).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Gcn, IdentityWeightsOnTwoNodes) {
  GcnLayerParams l = make_layer(2, 2, false, 1);
  l.weight = Matrix::Identity(2, 2);
  const auto s = normalized_adjacency_sparse(two_nodes());
  GcnOptions o;
  o.relu = false;
  EXPECT_TRUE(gcn_forward(Matrix::Identity(2, 2), s, l, o).isApprox(Matrix::Constant(2, 2, 0.5)));
  EXPECT_TRUE(gcn_forward(Matrix::Zero(2, 2), s, l, o).isZero());
}

TEST(Gcn, MatchesDenseOracleInBothModes) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 8 + 8 * (t % 2);
    const auto g = oracle::random_cpg(n, rng);
    const bool bn = t % 3 != 0, residual = t % 4 == 0, relu = t % 5 != 0;
    const int in = 4, out = residual ? 4 : 3;
    GcnLayerParams layer = oracle::random_layer(in, out, bn, rng);
    const Matrix h = random_matrix(n, in, rng);
    const Matrix s = oracle::dense_normalized_adjacency(g);
    GcnOptions o;
    o.relu = relu;
    o.residual = residual;
    const auto ss = normalized_adjacency_sparse(g);
    const Matrix eval_want = oracle::dense_gcn(h, s, layer, false, relu, residual);
    EXPECT_LE((gcn_forward(h, ss, std::as_const(layer), o) - eval_want).cwiseAbs().maxCoeff(), 1e-6);
    const Matrix train_want = oracle::dense_gcn(h, s, layer, true, relu, residual);
    EXPECT_LE((gcn_forward(h, ss, layer, o, Mode::Train) - train_want).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(BatchNorm, IdentityAndConstantCases) {
  GcnLayerParams l = make_layer(2, 2, true, 1);
  Matrix x(4, 2);
  x << 1, -1, -1, 1, 1, -1, -1, 1;
  EXPECT_LE((batchnorm(x, l, Mode::Train) - x).cwiseAbs().maxCoeff(), 1e-5);
  l.gamma.setZero();
  l.beta.setConstant(5);
  std::mt19937_64 rng(1);
  EXPECT_TRUE(batchnorm(random_matrix(4, 2, rng), l, Mode::Train).isApprox(Matrix::Constant(4, 2, 5)));
}

TEST(BatchNorm, MomentumOneMakesEvalMatchTrain) {
  std::mt19937_64 rng(4);
  GcnLayerParams l = oracle::random_layer(3, 3, true, rng);
  const Matrix x = random_matrix(7, 3, rng);
  const Matrix train = batchnorm(x, l, Mode::Train, 1.0);
  const Matrix eval = batchnorm(x, std::as_const(l));
  EXPECT_LE((train - eval).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_TRUE((l.running_var.array() >= 0).all());
}

TEST(Dropout, IdentityCasesAndKeepRate) {
  const Matrix x = Matrix::Constant(100, 1000, 2.0);
  EXPECT_EQ(dropout(x, 0.0, Mode::Train, 1), x);
  EXPECT_EQ(dropout(x, 0.5, Mode::Eval, 1), x);
  const Matrix y = dropout(x, 0.5, Mode::Train, 1);
  const double kept = static_cast<double>((y.array() != 0.0).count()) / static_cast<double>(y.size());
  EXPECT_NEAR(kept, 0.5, 0.01);
  EXPECT_TRUE(((y.array() == 0.0) || (y.array() == 4.0)).all());
}

TEST(SinkModel, ArchitectureAndSoftmax) {
  auto m = SinkModel::create({}, 1);
  EXPECT_EQ(m.layers.size(), 6u);
  EXPECT_EQ(m.dims(), (std::vector<int>{128, 256, 256, 256, 256, 256, 2}));
  std::mt19937_64 rng(2);
  const auto g = oracle::random_cpg(12, rng);
  const Matrix p = sink_forward(g, random_matrix(12, 128, rng), m);
  ASSERT_EQ(p.cols(), 2);
  for (Eigen::Index r = 0; r < p.rows(); ++r) EXPECT_NEAR(p.row(r).sum(), 1.0, 1e-6);
  for (auto& t : m.tensors())
    if (t.trainable && t.name.find("gamma") == std::string::npos) t.value->setZero();
  const Matrix u = sink_forward(g, random_matrix(12, 128, rng), m);
  EXPECT_TRUE(u.isApprox(Matrix::Constant(12, 2, 0.5)));
}

TEST(Detector, ZeroReadoutMeanPoolAndRange) {
  std::mt19937_64 rng(3);
  auto d = DetectorModel::create({}, 5);
  const auto g = oracle::random_cpg(9, rng);
  const Matrix x = random_matrix(9, 128, rng);
  const double p = detector_forward(g, x, d);
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1.0);

  // Two disjoint copies pool to the same mean.
  frontend::CodePropertyGraph twice = g;
  for (const auto& n : g.nodes) twice.nodes.push_back({n.id + 100, n.kind, n.code, n.line, n.is_statement});
  for (const auto& e : g.edges) twice.edges.push_back({e.src + 100, e.dst + 100, e.kind, e.var});
  twice.finalize();
  Matrix xx(18, 128);
  xx << x, x;
  EXPECT_NEAR(detector_forward(twice, xx, d), p, 1e-12);

  d.readout_weight.setZero();
  d.readout_bias.setZero();
  EXPECT_DOUBLE_EQ(detector_forward(g, x, d), 0.5);
}

TEST(Models, PermutationEquivariance) {
  std::mt19937_64 rng(6);
  const auto g = oracle::random_cpg(10, rng);
  const Matrix x = random_matrix(10, 6, rng);
  std::vector<int> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  // Node i of g becomes node perm[i] of h.
  frontend::CodePropertyGraph h;
  for (const auto& n : g.nodes) h.nodes.push_back({perm[static_cast<std::size_t>(n.id)], n.kind, n.code, n.line, true});
  for (const auto& e : g.edges)
    h.edges.push_back({perm[static_cast<std::size_t>(e.src)], perm[static_cast<std::size_t>(e.dst)], e.kind, e.var});
  h.finalize();
  Matrix xh(10, 6);
  for (int i = 0; i < 10; ++i) xh.row(perm[static_cast<std::size_t>(i)]) = x.row(i);
  const auto sink = SinkModel::create(small_sink(), 1);
  const Matrix a = sink_forward(g, x, sink), b = sink_forward(h, xh, sink);
  for (int i = 0; i < 10; ++i)
    EXPECT_LE((a.row(i) - b.row(perm[static_cast<std::size_t>(i)])).cwiseAbs().maxCoeff(), 1e-6);
  const auto det = DetectorModel::create(small_detector(), 2);
  EXPECT_NEAR(detector_forward(g, x, det), detector_forward(h, xh, det), 1e-6);
}

TEST(Loss, WeightedCrossEntropyValues) {
  Matrix perfect(2, 2);
  perfect << 1, 0, 0, 1;
  EXPECT_NEAR(weighted_cross_entropy(perfect, {0, 1}, {1, 1}).loss, 0.0, 1e-12);
  EXPECT_NEAR(weighted_cross_entropy(Matrix::Constant(3, 2, 0.5), {0, 1, -1}, {1, 1}).loss, std::log(2.0), 1e-12);
}

TEST(Loss, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(12);
  const Matrix logits = random_matrix(6, 2, rng);
  const std::vector<int> labels{0, 1, 1, -1, 0, 1};
  const std::array<double, 2> w{0.7, 2.5};
  auto loss = [&](const Matrix& z) { return weighted_cross_entropy(softmax_rows(z), labels, w).loss; };
  const Matrix p = softmax_rows(logits);
  const Matrix g = softmax_backward(p, weighted_cross_entropy(p, labels, w).grad);
  double worst = 0, scale = 1e-7;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    Matrix a = logits, b = logits;
    a.data()[i] += 1e-6;
    b.data()[i] -= 1e-6;
    const double num = (loss(a) - loss(b)) / 2e-6;
    worst = std::max(worst, std::abs(num - g.data()[i]));
    scale = std::max({scale, std::abs(num), std::abs(g.data()[i])});
  }
  EXPECT_LE(worst / scale, 1e-4);

  const Eigen::VectorXd z = random_matrix(5, 1, rng);
  const std::vector<int> y{1, 0, 0, 1, 1};
  const auto r = binary_cross_entropy_logits(z, y);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Eigen::VectorXd a = z, b = z;
    a(i) += 1e-6;
    b(i) -= 1e-6;
    const double num = (binary_cross_entropy_logits(a, y).loss - binary_cross_entropy_logits(b, y).loss) / 2e-6;
    EXPECT_NEAR(num, r.grad(i, 0), 1e-8);
  }
  EXPECT_NEAR(binary_cross_entropy_logits(Eigen::VectorXd::Constant(2, 800.0), {1, 1}).loss, 0.0, 1e-12);
  EXPECT_TRUE(std::isfinite(binary_cross_entropy_logits(Eigen::VectorXd::Constant(2, -800.0), {1, 1}).loss));
}

TEST(Loss, InverseFrequencyWeights) {
  const auto w = inverse_frequency_weights({0, 0, 0, 1, -1});
  EXPECT_DOUBLE_EQ(w[0], 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(w[1], 2.0);
}

TEST(Adam, FirstStepAndZeroGradient) {
  Matrix p(1, 3);
  p << 1, 2, 3;
  Matrix g(1, 3);
  g << 0.5, -2, 0;
  AdamState s;
  s.lr = 0.01;
  adam_step({&p}, {g}, s);
  EXPECT_NEAR(p(0, 0), 1 - 0.01, 1e-6);
  EXPECT_NEAR(p(0, 1), 2 + 0.01, 1e-6);
  EXPECT_DOUBLE_EQ(p(0, 2), 3);
  EXPECT_EQ(s.step, 1);
  Matrix q = Matrix::Ones(2, 2);
  AdamState z;
  for (int i = 0; i < 5; ++i) adam_step({&q}, {Matrix::Zero(2, 2)}, z);
  EXPECT_EQ(q, Matrix::Ones(2, 2));
}

TEST(GradCheck, BothModelsOnRandomGraph) {
  std::mt19937_64 rng(21);
  const auto g = oracle::random_cpg(10, rng);
  const auto sample = labeled_sample(g, rng, 6);
  const auto rs = finite_diff_check(SinkModel::create(small_sink(), 3), sample);
  EXPECT_TRUE(rs.passed) << rs.max_relative_error;
  const auto rd = finite_diff_check(DetectorModel::create(small_detector(), 4), sample);
  EXPECT_TRUE(rd.passed) << rd.max_relative_error;
  EXPECT_FALSE(rs.tensors.empty());
  EXPECT_FALSE(rd.tensors.empty());
}

TEST(GradCheck, ZeroWeightModels) {
  std::mt19937_64 rng(22);
  const auto g = oracle::random_cpg(8, rng);
  const auto sample = labeled_sample(g, rng, 6);
  auto sink = SinkModel::create(small_sink(), 3);
  for (auto& t : sink.tensors())
    if (t.trainable) t.value->setZero();
  auto det = DetectorModel::create(small_detector(), 3);
  for (auto& t : det.tensors())
    if (t.trainable) t.value->setZero();
  const auto a = finite_diff_check(sink, sample), b = finite_diff_check(det, sample);
  EXPECT_TRUE(a.finite && a.passed);
  EXPECT_TRUE(b.finite && b.passed);
}

namespace {

// Tiny separable task: sink nodes carry a distinctive feature.
std::vector<GraphSample> toy_set(int graphs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GraphSample> out;
  for (int i = 0; i < graphs; ++i) {
    const auto g = oracle::random_cpg(6, rng, 0.3);
    Matrix x = random_matrix(6, 6, rng) * 0.1;
    std::vector<int> labels(6, 0);
    const bool vulnerable = i % 2 == 0;
    if (vulnerable) {
      labels[static_cast<std::size_t>(i % 6)] = 1;
      x(i % 6, 0) += 3.0;
      x.col(1).array() += 1.0;
    }
    out.push_back(make_sample(g, x, labels, vulnerable ? 1 : 0));
  }
  return out;
}

}  // namespace

TEST(Training, SinkLearnsToyTaskDeterministically) {
  const auto train = toy_set(40, 1), val = toy_set(10, 2);
  const SinkModelConfig mc{6, 16, 3, 0.1};
  TrainConfig c;
  c.epochs = 30;
  c.batch_size = 8;
  c.lr = 0.01;
  TrainReport r;
  const auto m = train_sink(train, val, mc, c, &r);
  EXPECT_EQ(r.train_loss.size(), 30u);
  EXPECT_GE(r.best_score, 0.9);
  const auto again = train_sink(train, val, mc, c);
  SinkCheckpoint a{m, {}, {}, 1}, b{again, {}, {}, 1};
  EXPECT_EQ(checkpoint_digest(to_json(a)), checkpoint_digest(to_json(b)));
  c.epochs = 0;
  TrainReport r0;
  const auto init = train_sink(train, val, mc, c, &r0);
  SinkCheckpoint i0{init, {}, {}, 1}, fresh{SinkModel::create(mc, c.seed), {}, {}, 1};
  EXPECT_EQ(to_json(i0)["tensors"], to_json(fresh)["tensors"]);
  EXPECT_EQ(r0.best_epoch, 0);
}

TEST(Training, SinkWithoutPositivesThrows) {
  auto train = toy_set(4, 1);
  for (auto& s : train) std::fill(s.node_labels.begin(), s.node_labels.end(), 0);
  EXPECT_THROW(train_sink(train, train, small_sink(), {}), NoPositives);
}

TEST(Training, DetectorLearnsAndFlippedLabelsInvert) {
  const auto train = toy_set(60, 3), val = toy_set(20, 4);
  TrainConfig c;
  c.epochs = 20;
  c.batch_size = 8;
  c.lr = 0.01;
  const auto d = train_detector(train, val, small_detector(), c);
  EXPECT_GE(detector_accuracy(d, val), 0.85);
  auto flipped = train;
  for (auto& s : flipped) s.graph_label = 1 - s.graph_label;
  auto flipped_val = val;
  for (auto& s : flipped_val) s.graph_label = 1 - s.graph_label;
  const auto f = train_detector(flipped, flipped_val, small_detector(), c);
  EXPECT_LE(detector_accuracy(f, val), 0.15);
  auto single = train;
  for (auto& s : single) s.graph_label = 1;
  EXPECT_THROW(train_detector(single, val, small_detector(), c), SingleClass);
}

TEST(Checkpoint, JsonRoundTripAndSchemaErrors) {
  features::EmbeddingTable t;
  t.vocab.add("x", 4);
  t.vectors = Matrix::Constant(2, 6, 0.25);
  SinkCheckpoint s{SinkModel::create(small_sink(), 9), t, {{"epochs", 3}}, 9};
  const auto doc = to_json(s);
  const auto back = sink_checkpoint_from_json(nlohmann::json::parse(doc.dump()));
  EXPECT_EQ(checkpoint_digest(to_json(back)), checkpoint_digest(doc));
  DetectorCheckpoint d{DetectorModel::create(small_detector(), 9), t, {}, 9};
  const auto ddoc = to_json(d);
  EXPECT_EQ(checkpoint_digest(to_json(detector_checkpoint_from_json(ddoc))), checkpoint_digest(ddoc));
  auto broken = doc;
  broken.erase("tensors");
  EXPECT_THROW(sink_checkpoint_from_json(broken), SchemaError);
  EXPECT_THROW(detector_checkpoint_from_json(doc), SchemaError);
}

TEST(Batch, BlockDiagonalUnion) {
  std::mt19937_64 rng(1);
  const auto a = make_sample(two_nodes(), random_matrix(2, 3, rng), {0, 1}, 1);
  const auto b = make_sample(oracle::random_cpg(3, rng), random_matrix(3, 3, rng), {}, 0);
  const auto batch = make_batch({&a, &b});
  EXPECT_EQ(batch.graphs(), 2u);
  EXPECT_EQ(batch.adjacency.rows(), 5);
  EXPECT_EQ(batch.node_labels, (std::vector<int>{0, 1, -1, -1, -1}));
  EXPECT_EQ(batch.statement_rows[1], (std::vector<int>{2, 3, 4}));
  EXPECT_EQ(Matrix(batch.adjacency).block(0, 2, 2, 3), Matrix::Zero(2, 3));
  EXPECT_THROW(make_sample(two_nodes(), Matrix::Zero(3, 3)), ShapeMismatch);
}
