#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "vulpath/config.hpp"
#include "vulpath/error.hpp"

namespace vulpath {

using nlohmann::json;

namespace {

// Reads `doc` field by field, rejecting anything not consumed.
class Reader {
 public:
  Reader(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!doc_.contains(key)) return;
    try {
      out = doc_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
    if constexpr (std::is_arithmetic_v<T> && !std::is_same_v<T, bool>) {
      if (doc_.at(key).is_boolean()) throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  Reader section(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Reader(doc_.contains(key) ? doc_.at(key) : empty, path_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items())
      if (!seen_.count(key)) throw ConfigError(path_ + "." + key + ": unknown key");
  }

 private:
  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void validate(const RunConfig& c) {
  const auto& e = c.embedding;
  require(e.dims >= 1 && e.walks_per_node >= 0 && e.walk_len >= 1 && e.window >= 1 && e.negatives >= 0 &&
              e.epochs >= 0 && e.lr > 0 && e.min_count >= 1 && e.sample >= 0,
          "embedding: values out of range");
  require(c.sink.layers >= 2 && c.sink.hidden >= 1 && c.sink.dropout >= 0 && c.sink.dropout < 1 && c.sink.lr > 0 &&
              c.sink.epochs >= 0 && c.sink.batch >= 1 && c.sink.threshold >= 0 && c.sink.threshold <= 1,
          "sink: values out of range");
  require(c.detector.layers >= 1 && c.detector.hidden >= 1 && c.detector.dropout >= 0 && c.detector.dropout < 1 &&
              c.detector.lr > 0 && c.detector.epochs >= 0 && c.detector.batch >= 1,
          "detector: values out of range");
  require(c.slicer.max_depth >= 1 && c.slicer.max_paths >= 1, "slicer: values out of range");
  require(c.baselines.lambda >= 0 && c.baselines.steps >= 0 && c.baselines.k >= 1 && c.baselines.lr > 0,
          "baselines: values out of range");
  double total = 0;
  for (double f : c.split) {
    require(f >= 0, "split: fractions must be non-negative");
    total += f;
  }
  require(std::abs(total - 1.0) < 1e-9, "split: fractions must sum to 1");
  require(c.jobs >= 1, "jobs: must be at least 1");
}

}  // namespace

RunConfig config_from_json(const json& doc) {
  RunConfig c;
  Reader root(doc, "$");
  root.get("seed", c.seed);
  root.get("split", c.split);
  root.get("jobs", c.jobs);
  {
    Reader r = root.section("embedding");
    auto& e = c.embedding;
    r.get("dims", e.dims);
    r.get("walks_per_node", e.walks_per_node);
    r.get("walk_len", e.walk_len);
    r.get("window", e.window);
    r.get("negatives", e.negatives);
    r.get("epochs", e.epochs);
    r.get("lr", e.lr);
    r.get("min_count", e.min_count);
    r.get("sample", e.sample);
    r.finish();
  }
  {
    Reader r = root.section("sink");
    auto& s = c.sink;
    r.get("layers", s.layers);
    r.get("hidden", s.hidden);
    r.get("dropout", s.dropout);
    r.get("lr", s.lr);
    r.get("epochs", s.epochs);
    r.get("batch", s.batch);
    r.get("threshold", s.threshold);
    r.finish();
  }
  {
    Reader r = root.section("detector");
    auto& d = c.detector;
    r.get("layers", d.layers);
    r.get("hidden", d.hidden);
    r.get("dropout", d.dropout);
    r.get("lr", d.lr);
    r.get("epochs", d.epochs);
    r.get("batch", d.batch);
    r.finish();
  }
  {
    Reader r = root.section("slicer");
    r.get("max_depth", c.slicer.max_depth);
    r.get("max_paths", c.slicer.max_paths);
    r.finish();
  }
  {
    Reader r = root.section("baselines");
    auto& b = c.baselines;
    r.get("api_list", b.api_list);
    r.get("lambda", b.lambda);
    r.get("steps", b.steps);
    r.get("k", b.k);
    r.get("lr", b.lr);
    r.finish();
  }
  root.finish();
  validate(c);
  return c;
}

json config_to_json(const RunConfig& c) {
  const auto& e = c.embedding;
  const auto& s = c.sink;
  const auto& d = c.detector;
  const auto& b = c.baselines;
  return {{"seed", c.seed},
          {"split", c.split},
          {"jobs", c.jobs},
          {"embedding",
           {{"dims", e.dims},
            {"walks_per_node", e.walks_per_node},
            {"walk_len", e.walk_len},
            {"window", e.window},
            {"negatives", e.negatives},
            {"epochs", e.epochs},
            {"lr", e.lr},
            {"min_count", e.min_count},
            {"sample", e.sample}}},
          {"sink",
           {{"layers", s.layers},
            {"hidden", s.hidden},
            {"dropout", s.dropout},
            {"lr", s.lr},
            {"epochs", s.epochs},
            {"batch", s.batch},
            {"threshold", s.threshold}}},
          {"detector",
           {{"layers", d.layers},
            {"hidden", d.hidden},
            {"dropout", d.dropout},
            {"lr", d.lr},
            {"epochs", d.epochs},
            {"batch", d.batch}}},
          {"slicer", {{"max_depth", c.slicer.max_depth}, {"max_paths", c.slicer.max_paths}}},
          {"baselines", {{"api_list", b.api_list}, {"lambda", b.lambda}, {"steps", b.steps}, {"k", b.k}, {"lr", b.lr}}}};
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

void apply_environment(RunConfig& config) {
  const char* v = std::getenv("VULPATH_SEED");
  if (!v || !*v) return;
  char* end = nullptr;
  errno = 0;
  const unsigned long long seed = std::strtoull(v, &end, 10);
  if (errno != 0 || *end != '\0' || *v == '-') throw ConfigError(std::string("VULPATH_SEED is not a seed: ") + v);
  config.seed = seed;
}

}  // namespace vulpath
