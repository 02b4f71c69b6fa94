#include <cctype>

#include "vulpath/error.hpp"
#include "vulpath/features/embedding.hpp"

namespace vulpath::features {

using nlohmann::json;

std::vector<std::string> tokenize_node(const frontend::CpgNode& node) {
  std::vector<std::string> out{std::string(frontend::to_string(node.kind))};
  const std::string& code = node.code;
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  for (std::size_t i = 0; i < code.size();) {
    if (!alnum(code[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < code.size() && alnum(code[j])) ++j;
    if (std::isdigit(static_cast<unsigned char>(code[i]))) {
      out.emplace_back("NUM");
    } else {
      out.emplace_back(code.substr(i, j - i));
    }
    i = j;
  }
  return out;
}

TokenVocab::TokenVocab() { add(kUnk); }

int TokenVocab::index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? 0 : it->second;
}

int TokenVocab::add(const std::string& token, std::int64_t count) {
  auto [it, fresh] = index_.emplace(token, static_cast<int>(tokens_.size()));
  if (fresh) {
    tokens_.push_back(token);
    counts_.push_back(count);
  } else {
    counts_[static_cast<std::size_t>(it->second)] += count;
  }
  return it->second;
}

json embedding_to_json(const EmbeddingTable& table) {
  json vectors = json::array();
  for (Eigen::Index r = 0; r < table.vectors.rows(); ++r) {
    std::vector<double> row(table.vectors.cols());
    for (Eigen::Index c = 0; c < table.vectors.cols(); ++c) row[static_cast<std::size_t>(c)] = table.vectors(r, c);
    vectors.push_back(std::move(row));
  }
  return {{"dims", table.dims()}, {"vocab", table.vocab.tokens()}, {"vectors", std::move(vectors)}};
}

EmbeddingTable embedding_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("$", "expected object");
  for (const char* key : {"dims", "vocab", "vectors"})
    if (!doc.contains(key)) throw SchemaError(std::string("$.") + key, "missing required member");
  const int dims = doc["dims"].get<int>();
  const auto vocab = doc["vocab"].get<std::vector<std::string>>();
  const json& vectors = doc["vectors"];
  if (vocab.empty() || vocab.front() != kUnk) throw SchemaError("$.vocab[0]", "first token must be <UNK>");
  if (!vectors.is_array() || vectors.size() != vocab.size())
    throw SchemaError("$.vectors", "expected one row per vocabulary token");
  EmbeddingTable t;
  for (std::size_t i = 1; i < vocab.size(); ++i) t.vocab.add(vocab[i]);
  t.vectors.resize(static_cast<Eigen::Index>(vocab.size()), dims);
  for (std::size_t r = 0; r < vocab.size(); ++r) {
    const auto row = vectors[r].get<std::vector<double>>();
    if (row.size() != static_cast<std::size_t>(dims))
      throw SchemaError("$.vectors[" + std::to_string(r) + "]", "row width differs from dims");
    for (int c = 0; c < dims; ++c) t.vectors(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)];
  }
  return t;
}

Eigen::MatrixXd node_feature_matrix(const frontend::CodePropertyGraph& cpg, const EmbeddingTable& table) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cpg.size()), table.dims());
  for (std::size_t i = 0; i < cpg.size(); ++i) {
    const auto tokens = tokenize_node(cpg.nodes[i]);
    for (const auto& t : tokens) x.row(static_cast<Eigen::Index>(i)) += table.vectors.row(table.vocab.index(t));
    x.row(static_cast<Eigen::Index>(i)) /= static_cast<double>(tokens.size());
  }
  return x;
}

}  // namespace vulpath::features
