#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "vulpath/error.hpp"
#include "vulpath/features/embedding.hpp"

namespace vulpath::features {
namespace {

double sigmoid(double x) {
  if (x > 30) return 1.0;
  if (x < -30) return 0.0;
  return 1.0 / (1.0 + std::exp(-x));
}

// Unigram^0.75 noise distribution as a cumulative table.
class NoiseSampler {
 public:
  explicit NoiseSampler(const TokenVocab& vocab) {
    double total = 0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      total += std::pow(static_cast<double>(vocab.count(static_cast<int>(i))), 0.75);
      cumulative_.push_back(total);
    }
  }
  int draw(std::mt19937_64& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, cumulative_.back())(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<int>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

EmbeddingTable train_skipgram(const std::vector<Walk>& sequences, const SkipGramConfig& config,
                              SkipGramStats* stats) {
  std::size_t total_tokens = 0;
  std::map<std::string, std::int64_t> counts;
  for (const auto& s : sequences) {
    total_tokens += s.size();
    for (const auto& t : s) ++counts[t];
  }
  if (total_tokens == 0) throw EmptyCorpus("skip-gram corpus has no tokens");

  EmbeddingTable table;
  std::int64_t rare = 0;
  for (const auto& [token, c] : counts) {
    if (token == kUnk || c < config.min_count)
      rare += c;
    else
      table.vocab.add(token, c);
  }
  table.vocab.add(kUnk, rare);

  const auto v = static_cast<Eigen::Index>(table.vocab.size());
  const int d = config.dims;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> init(-0.5 / d, 0.5 / d);
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor input(v, d);
  for (Eigen::Index r = 0; r < v; ++r)
    for (int c = 0; c < d; ++c) input(r, c) = init(rng);
  RowMajor context = RowMajor::Zero(v, d);

  std::vector<std::vector<int>> encoded;
  encoded.reserve(sequences.size());
  for (const auto& s : sequences) {
    std::vector<int> ids;
    ids.reserve(s.size());
    for (const auto& t : s) ids.push_back(table.vocab.index(t));
    encoded.push_back(std::move(ids));
  }

  // Never sample UNK as noise unless it actually occurs.
  NoiseSampler noise(table.vocab);
  const double total_steps = static_cast<double>(total_tokens) * std::max(config.epochs, 0);
  double step = 0;
  Eigen::RowVectorXd grad_center(d);
  std::vector<double> keep(static_cast<std::size_t>(v), 1.0);
  if (config.sample > 0) {
    for (Eigen::Index i = 0; i < v; ++i) {
      const double f = static_cast<double>(table.vocab.count(static_cast<int>(i))) / static_cast<double>(total_tokens);
      if (f > 0) keep[static_cast<std::size_t>(i)] = std::min(1.0, (std::sqrt(f / config.sample) + 1) * config.sample / f);
    }
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> seq;
  std::vector<std::size_t> order(encoded.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0;
    std::size_t pairs = 0;
    for (std::size_t w : order) {
      const auto& full = encoded[w];
      seq.clear();
      for (int t : full) {
        step += 1;
        if (keep[static_cast<std::size_t>(t)] >= 1.0 || unit(rng) < keep[static_cast<std::size_t>(t)]) seq.push_back(t);
      }
      const double lr = std::max(config.lr * (1.0 - step / total_steps), config.lr * 1e-4);
      const auto len = static_cast<int>(seq.size());
      for (int i = 0; i < len; ++i) {
        const int center = seq[static_cast<std::size_t>(i)];
        for (int j = std::max(0, i - config.window); j <= std::min(len - 1, i + config.window); ++j) {
          if (j == i) continue;
          const int target = seq[static_cast<std::size_t>(j)];
          grad_center.setZero();
          auto in = input.row(center);
          for (int k = 0; k <= config.negatives; ++k) {
            int out_id = target;
            double label = 1.0;
            if (k > 0) {
              out_id = noise.draw(rng);
              if (out_id == target) continue;
              label = 0.0;
            }
            auto out = context.row(out_id);
            const double score = sigmoid(in.dot(out));
            loss -= label > 0 ? std::log(std::max(score, 1e-12)) : std::log(std::max(1.0 - score, 1e-12));
            const double g = lr * (label - score);
            grad_center += g * out;
            out += g * in;
          }
          in += grad_center;
          ++pairs;
        }
      }
    }
    if (stats) stats->epoch_loss.push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
  }
  table.vectors = input;
  return table;
}

}  // namespace vulpath::features
