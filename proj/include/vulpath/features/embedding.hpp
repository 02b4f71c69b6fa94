#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "vulpath/frontend/cpg.hpp"

namespace vulpath::features {

/// `[kind, content tokens...]`; identifiers kept whole, numeric literals
/// mapped to `NUM`.
std::vector<std::string> tokenize_node(const frontend::CpgNode& node);

inline constexpr const char* kUnk = "<UNK>";

class TokenVocab {
 public:
  TokenVocab();

  /// Index of `token`, or 0 (UNK) when absent.
  int index(const std::string& token) const;
  int add(const std::string& token, std::int64_t count = 0);
  std::size_t size() const { return tokens_.size(); }
  const std::string& token(int i) const { return tokens_.at(static_cast<std::size_t>(i)); }
  std::int64_t count(int i) const { return counts_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, int> index_;
};

/// Token -> dims-dimensional vector; realizes the vec() embedding.
struct EmbeddingTable {
  TokenVocab vocab;
  Eigen::MatrixXd vectors;  // vocab.size() x dims

  int dims() const { return static_cast<int>(vectors.cols()); }
};

nlohmann::json embedding_to_json(const EmbeddingTable& table);
EmbeddingTable embedding_from_json(const nlohmann::json& doc);

using Walk = std::vector<std::string>;

/// `walks_per_node` uniform random walks of `walk_len` nodes from every node
/// over the undirected, kind-blind union of all edges. Each walk is the
/// concatenated token stream of the visited nodes.
std::vector<Walk> generate_walks(const frontend::CodePropertyGraph& cpg, int walks_per_node, int walk_len,
                                 std::uint64_t seed);

struct SkipGramConfig {
  int dims = 128;
  int window = 2;
  int negatives = 5;
  int epochs = 5;
  double lr = 0.025;
  int min_count = 3;    // rarer tokens train the UNK row
  double sample = 1e-3;  // frequent-token subsampling threshold; 0 disables
  std::uint64_t seed = 42;
};

struct SkipGramStats {
  std::vector<double> epoch_loss;  // mean objective per (center, context) pair
};

/// Skip-gram with negative sampling. Throws EmptyCorpus.
EmbeddingTable train_skipgram(const std::vector<Walk>& sequences, const SkipGramConfig& config,
                              SkipGramStats* stats = nullptr);

/// Row i = mean embedding of tokenize_node(cpg.nodes[i]); OOV tokens use UNK.
Eigen::MatrixXd node_feature_matrix(const frontend::CodePropertyGraph& cpg, const EmbeddingTable& table);

}  // namespace vulpath::features
