#include <fstream>

#include "vulpath/error.hpp"
#include "vulpath/nn/checkpoint.hpp"
#include "vulpath/util/md5.hpp"

namespace vulpath::nn {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void matrix_from_json(const json& doc, Matrix& out, const std::string& path) {
  if (!doc.is_array() || static_cast<Eigen::Index>(doc.size()) != out.rows())
    throw SchemaError(path, "expected " + std::to_string(out.rows()) + " rows");
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const json& row = doc[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != out.cols())
      throw SchemaError(path + "[" + std::to_string(r) + "]", "expected " + std::to_string(out.cols()) + " columns");
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw SchemaError(path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]", "not a number");
      out(r, c) = v.get<double>();
    }
  }
}

template <typename Model>
json checkpoint_json(const Checkpoint<Model>& ckpt, const char* arch, json model_config) {
  Model copy = ckpt.model;
  json tensors = json::object();
  for (const auto& t : copy.tensors()) tensors[t.name] = matrix_to_json(*t.value);
  return {{"arch", arch},
          {"dims", copy.dims()},
          {"tensors", std::move(tensors)},
          {"config", {{"model", std::move(model_config)}, {"train", ckpt.train}}},
          {"seed", ckpt.seed},
          {"embedding", features::embedding_to_json(ckpt.embedding)}};
}

const json& member(const json& doc, const std::string& key, const std::string& path) {
  if (!doc.is_object() || !doc.contains(key)) throw SchemaError(path + "." + key, "missing required member");
  return doc.at(key);
}

template <typename Model, typename Config>
Checkpoint<Model> checkpoint_from_json(const json& doc, const char* arch, Config (*parse)(const json&)) {
  const json& a = member(doc, "arch", "$");
  if (!a.is_string() || a.get<std::string>() != arch) throw SchemaError("$.arch", std::string("expected \"") + arch + "\"");
  const json& config = member(doc, "config", "$");
  Checkpoint<Model> ckpt;
  ckpt.model = Model::create(parse(member(config, "model", "$.config")), 0);
  ckpt.train = config.value("train", json::object());
  ckpt.seed = member(doc, "seed", "$").get<std::uint64_t>();
  if (member(doc, "dims", "$").get<std::vector<int>>() != ckpt.model.dims())
    throw SchemaError("$.dims", "does not match the model configuration");
  const json& tensors = member(doc, "tensors", "$");
  for (auto& t : ckpt.model.tensors())
    matrix_from_json(member(tensors, t.name, "$.tensors"), *t.value, "$.tensors." + t.name);
  ckpt.embedding = features::embedding_from_json(member(doc, "embedding", "$"));
  return ckpt;
}

SinkModelConfig parse_sink_config(const json& j) {
  SinkModelConfig c;
  c.in_dim = j.value("in_dim", c.in_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.layers = j.value("layers", c.layers);
  c.dropout = j.value("dropout", c.dropout);
  return c;
}

DetectorConfig parse_detector_config(const json& j) {
  DetectorConfig c;
  c.in_dim = j.value("in_dim", c.in_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.layers = j.value("layers", c.layers);
  c.dropout = j.value("dropout", c.dropout);
  return c;
}

}  // namespace

json to_json(const SinkCheckpoint& ckpt) {
  const auto& c = ckpt.model.config;
  return checkpoint_json(ckpt, "sink",
                         {{"in_dim", c.in_dim}, {"hidden", c.hidden}, {"layers", c.layers}, {"dropout", c.dropout}});
}

json to_json(const DetectorCheckpoint& ckpt) {
  const auto& c = ckpt.model.config;
  return checkpoint_json(ckpt, "detector",
                         {{"in_dim", c.in_dim}, {"hidden", c.hidden}, {"layers", c.layers}, {"dropout", c.dropout}});
}

SinkCheckpoint sink_checkpoint_from_json(const json& doc) {
  return checkpoint_from_json<SinkModel>(doc, "sink", &parse_sink_config);
}

DetectorCheckpoint detector_checkpoint_from_json(const json& doc) {
  return checkpoint_from_json<DetectorModel>(doc, "detector", &parse_detector_config);
}

std::string checkpoint_digest(const json& doc) { return util::md5_hex(doc.dump()); }

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc, int indent) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(indent) << '\n';
}

}  // namespace vulpath::nn
