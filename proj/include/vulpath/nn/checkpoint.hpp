#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "vulpath/features/embedding.hpp"
#include "vulpath/nn/models.hpp"

namespace vulpath::nn {

/// A trained model with the embedding its features came from. `train` holds
/// the training settings recorded alongside the weights.
template <typename Model>
struct Checkpoint {
  Model model;
  features::EmbeddingTable embedding;
  nlohmann::json train = nlohmann::json::object();
  std::uint64_t seed = 0;
};

using SinkCheckpoint = Checkpoint<SinkModel>;
using DetectorCheckpoint = Checkpoint<DetectorModel>;

/// `{"arch", "dims", "tensors", "config", "seed", "embedding"}`.
nlohmann::json to_json(const SinkCheckpoint& checkpoint);
nlohmann::json to_json(const DetectorCheckpoint& checkpoint);
SinkCheckpoint sink_checkpoint_from_json(const nlohmann::json& doc);
DetectorCheckpoint detector_checkpoint_from_json(const nlohmann::json& doc);

/// MD5 of the compact serialization (keys sorted, shortest round-trip doubles).
std::string checkpoint_digest(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc, int indent = -1);

}  // namespace vulpath::nn
