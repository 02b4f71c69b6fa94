#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace vulpath {

struct EmbeddingParams {
  int dims = 128;
  int walks_per_node = 10;
  int walk_len = 8;
  int window = 2;
  int negatives = 5;
  int epochs = 5;
  double lr = 0.025;
  int min_count = 3;
  double sample = 1e-3;
};

struct SinkParams {
  int layers = 6;
  int hidden = 256;
  double dropout = 0.5;
  double lr = 1e-3;
  int epochs = 50;
  int batch = 64;
  double threshold = 0.5;  // p(sink) at or above marks a potential sink point
};

struct DetectorParams {
  int layers = 3;
  int hidden = 128;
  double dropout = 0.0;
  double lr = 1e-3;
  int epochs = 50;
  int batch = 64;
};

struct SlicerParams {
  int max_depth = 16;
  int max_paths = 256;
};

struct BaselineParams {
  std::vector<std::string> api_list{"memcpy", "memmove", "strcpy", "strcat", "sprintf", "alloca"};
  double lambda = 0.05;
  int steps = 200;
  int k = 10;
  double lr = 0.01;
};

/// Every tunable of a run. JSON keys mirror the field names; sections are
/// `embedding`, `sink`, `detector`, `slicer`, `baselines`, plus top-level
/// `seed`, `split` and `jobs`.
struct RunConfig {
  std::uint64_t seed = 42;
  EmbeddingParams embedding;
  SinkParams sink;
  DetectorParams detector;
  SlicerParams slicer;
  BaselineParams baselines;
  std::array<double, 3> split{0.7, 0.1, 0.2};
  int jobs = 1;
};

/// Starts from the defaults and applies `doc`. Unknown keys, wrong types and
/// out-of-range values throw ConfigError.
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

/// Applies VULPATH_SEED when set. Throws ConfigError on a malformed value.
void apply_environment(RunConfig& config);

}  // namespace vulpath
