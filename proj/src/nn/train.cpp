#include <algorithm>
#include <random>

#include "vulpath/error.hpp"
#include "vulpath/eval/metrics.hpp"
#include "vulpath/nn/adam.hpp"
#include "vulpath/nn/loss.hpp"
#include "vulpath/nn/train.hpp"

namespace vulpath::nn {
namespace {

// Every index once, plus minority-class indices drawn with replacement until
// both classes are equally represented; then shuffled.
std::vector<std::size_t> epoch_order(const std::vector<std::size_t>& positive, const std::vector<std::size_t>& negative,
                                     std::mt19937_64& rng) {
  std::vector<std::size_t> order(positive);
  order.insert(order.end(), negative.begin(), negative.end());
  const auto& minority = positive.size() < negative.size() ? positive : negative;
  const std::size_t gap = std::max(positive.size(), negative.size()) - minority.size();
  if (!minority.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, minority.size() - 1);
    for (std::size_t i = 0; i < gap; ++i) order.push_back(minority[pick(rng)]);
  }
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

std::vector<Matrix*> trainable(std::vector<NamedTensor> tensors) {
  std::vector<Matrix*> out;
  for (auto& t : tensors)
    if (t.trainable) out.push_back(t.value);
  return out;
}

template <typename Step, typename EpochEnd>
void run_epochs(const std::vector<GraphSample>& train, const std::vector<std::size_t>& positive,
                const std::vector<std::size_t>& negative, const TrainConfig& config, std::mt19937_64& rng,
                TrainReport& report, Step&& step, EpochEnd&& after_epoch) {
  const auto batch_size = static_cast<std::size_t>(std::max(config.batch_size, 1));
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto order = epoch_order(positive, negative, rng);
    double loss = 0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      std::vector<const GraphSample*> members;
      for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i)
        members.push_back(&train[order[i]]);
      loss += step(make_batch(members), rng());
      ++batches;
    }
    report.train_loss.push_back(batches ? loss / static_cast<double>(batches) : 0.0);
    after_epoch(epoch);
  }
}

std::vector<const GraphSample*> pointers(const std::vector<GraphSample>& samples) {
  std::vector<const GraphSample*> out;
  for (const auto& s : samples) out.push_back(&s);
  return out;
}

}  // namespace

std::vector<int> predict_sink_labels(const SinkModel& model, const std::vector<GraphSample>& samples,
                                     std::vector<int>* labels) {
  if (samples.empty()) return {};
  const GraphBatch batch = make_batch(pointers(samples));
  const Matrix probs = softmax_rows(sink_logits(model, batch.adjacency, batch.features));
  std::vector<int> pred(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index r = 0; r < probs.rows(); ++r) pred[static_cast<std::size_t>(r)] = probs(r, 1) >= 0.5 ? 1 : 0;
  if (labels) *labels = batch.node_labels;
  return pred;
}

double detector_accuracy(const DetectorModel& model, const std::vector<GraphSample>& samples) {
  if (samples.empty()) return 0.0;
  const GraphBatch batch = make_batch(pointers(samples));
  const Eigen::VectorXd logits = detector_logits(model, batch);
  std::size_t correct = 0;
  for (std::size_t g = 0; g < batch.graphs(); ++g)
    if ((logits(static_cast<Eigen::Index>(g)) >= 0 ? 1 : 0) == (batch.graph_labels[g] > 0 ? 1 : 0)) ++correct;
  return static_cast<double>(correct) / static_cast<double>(batch.graphs());
}

SinkModel train_sink(const std::vector<GraphSample>& train, const std::vector<GraphSample>& validation,
                     const SinkModelConfig& model_config, const TrainConfig& config, TrainReport* report) {
  std::vector<int> all_labels;
  std::vector<std::size_t> positive, negative;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& l = train[i].node_labels;
    all_labels.insert(all_labels.end(), l.begin(), l.end());
    (std::find(l.begin(), l.end(), 1) != l.end() ? positive : negative).push_back(i);
  }
  if (positive.empty()) throw NoPositives("training split has no sink-labeled node");
  const auto weights = inverse_frequency_weights(all_labels);

  SinkModel model = SinkModel::create(model_config, config.seed);
  SinkModel best = model;
  TrainReport local;
  TrainReport& rep = report ? *report : local;
  rep = {};
  AdamState adam;
  adam.lr = config.lr;
  std::mt19937_64 rng(config.seed);

  auto step = [&](const GraphBatch& batch, std::uint64_t seed) {
    SinkForwardCache cache;
    const Matrix probs = softmax_rows(sink_logits(model, batch.adjacency, batch.features, Mode::Train, seed, &cache));
    const LossResult loss = weighted_cross_entropy(probs, batch.node_labels, weights);
    const auto grads = sink_backward(model, batch.adjacency, cache, softmax_backward(probs, loss.grad));
    adam_step(trainable(model.tensors()), grads, adam);
    return loss.loss;
  };
  auto select = [&](int epoch) {
    if (validation.empty()) {
      best = model;
      rep.best_epoch = epoch;
      return;
    }
    std::vector<int> labels;
    const auto pred = predict_sink_labels(model, validation, &labels);
    const double score = eval::node_metrics(pred, labels).f1_macro;
    rep.validation_score.push_back(score);
    if (score > rep.best_score) {
      rep.best_score = score;
      rep.best_epoch = epoch;
      best = model;
    }
  };
  run_epochs(train, positive, negative, config, rng, rep, step, select);
  return best;
}

DetectorModel train_detector(const std::vector<GraphSample>& train, const std::vector<GraphSample>& validation,
                             const DetectorConfig& model_config, const TrainConfig& config, TrainReport* report) {
  std::vector<std::size_t> positive, negative;
  for (std::size_t i = 0; i < train.size(); ++i) (train[i].graph_label > 0 ? positive : negative).push_back(i);
  if (positive.empty() || negative.empty()) throw SingleClass("detector training needs both classes");

  DetectorModel model = DetectorModel::create(model_config, config.seed);
  DetectorModel best = model;
  TrainReport local;
  TrainReport& rep = report ? *report : local;
  rep = {};
  AdamState adam;
  adam.lr = config.lr;
  std::mt19937_64 rng(config.seed);

  auto step = [&](const GraphBatch& batch, std::uint64_t seed) {
    DetectorForwardCache cache;
    const Eigen::VectorXd logits = detector_logits(model, batch, Mode::Train, seed, &cache);
    const LossResult loss = binary_cross_entropy_logits(logits, batch.graph_labels);
    const auto grads = detector_backward(model, batch, cache, loss.grad.col(0));
    adam_step(trainable(model.tensors()), grads, adam);
    return loss.loss;
  };
  auto select = [&](int epoch) {
    if (validation.empty()) {
      best = model;
      rep.best_epoch = epoch;
      return;
    }
    const double score = detector_accuracy(model, validation);
    rep.validation_score.push_back(score);
    if (score > rep.best_score) {
      rep.best_score = score;
      rep.best_epoch = epoch;
      best = model;
    }
  };
  run_epochs(train, positive, negative, config, rng, rep, step, select);
  return best;
}

}  // namespace vulpath::nn
