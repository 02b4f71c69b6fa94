#include "vulpath/corpus/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "vulpath/error.hpp"
#include "vulpath/util/md5.hpp"

namespace vulpath::corpus {

using nlohmann::json;

namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::string normalize_source(std::string_view src) {
  std::string out;
  out.reserve(src.size());
  bool pending_space = false;
  auto emit = [&](char c) {
    if (pending_space && !out.empty() && word_char(out.back()) && word_char(c)) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  };
  for (std::size_t i = 0; i < src.size();) {
    char c = src[i];
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      pending_space = true;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      auto end = src.find("*/", i + 2);
      i = end == std::string_view::npos ? src.size() : end + 2;
      pending_space = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      ++i;
      continue;
    }
    if (c == '"' || c == '\'') {
      emit(c);
      ++i;
      while (i < src.size() && src[i] != c) {
        if (src[i] == '\\' && i + 1 < src.size()) out.push_back(src[i++]);
        out.push_back(src[i++]);
      }
      if (i < src.size()) out.push_back(src[i++]);
      continue;
    }
    emit(c);
    ++i;
  }
  return out;
}

std::string source_digest(std::string_view source) { return util::md5_hex(normalize_source(source)); }

json manifest_record(const CorpusEntry& e) {
  return {{"id", e.id}, {"file", e.file}, {"cwe", e.cwe}, {"vulnerable", e.vulnerable},
          {"sink_lines", e.sink_lines}};
}

std::vector<CorpusEntry> ingest_directory(const std::filesystem::path& root) {
  const auto manifest = root / "manifest.jsonl";
  std::ifstream in(manifest);
  if (!in) throw ManifestMissing("no manifest.jsonl in " + root.string());

  std::vector<CorpusEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string where = "manifest.jsonl:" + std::to_string(lineno);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(where, std::string("invalid JSON: ") + e.what());
    }
    CorpusEntry e;
    try {
      e.id = rec.at("id").get<std::string>();
      e.file = rec.at("file").get<std::string>();
      e.cwe = rec.at("cwe").get<std::string>();
      e.vulnerable = rec.at("vulnerable").get<bool>();
      e.sink_lines = rec.at("sink_lines").get<std::vector<int>>();
    } catch (const json::exception& ex) {
      throw SchemaError(where, ex.what());
    }
    std::sort(e.sink_lines.begin(), e.sink_lines.end());
    e.sink_lines.erase(std::unique(e.sink_lines.begin(), e.sink_lines.end()), e.sink_lines.end());
    if (e.vulnerable != !e.sink_lines.empty())
      throw SchemaError(where, "vulnerable must be true exactly when sink_lines is nonempty");

    std::ifstream src(root / e.file, std::ios::binary);
    if (!src) throw ManifestMismatch("manifest lists " + e.file + " but the file is absent");
    std::stringstream ss;
    ss << src.rdbuf();
    e.source = ss.str();
    e.md5 = source_digest(e.source);
    out.push_back(std::move(e));
  }
  return out;
}

void write_bundle(const std::filesystem::path& root, const std::vector<CorpusEntry>& entries) {
  std::filesystem::create_directories(root);
  std::ofstream manifest(root / "manifest.jsonl", std::ios::binary);
  for (const CorpusEntry& e : entries) {
    std::ofstream f(root / e.file, std::ios::binary);
    f << e.source;
    manifest << manifest_record(e).dump() << '\n';
  }
}

std::vector<CorpusEntry> dedup_md5(std::vector<CorpusEntry> entries) {
  std::unordered_set<std::string> seen;
  std::vector<CorpusEntry> out;
  for (auto& e : entries)
    if (seen.insert(e.md5).second) out.push_back(std::move(e));
  return out;
}

std::vector<int> align_labels(const CorpusEntry& entry, const frontend::CodePropertyGraph& cpg) {
  std::vector<int> labels(cpg.size(), -1);
  std::set<int> matched;
  for (std::size_t i = 0; i < cpg.size(); ++i) {
    const auto& n = cpg.nodes[i];
    if (!n.is_statement) continue;
    bool sink = std::binary_search(entry.sink_lines.begin(), entry.sink_lines.end(), n.line);
    labels[i] = sink ? 1 : 0;
    if (sink) matched.insert(n.line);
  }
  for (int line : entry.sink_lines) {
    if (!matched.count(line))
      throw LabelOutOfRange(entry.id + ": sink line " + std::to_string(line) + " has no statement node");
  }
  return labels;
}

std::string_view to_string(Bucket b) {
  switch (b) {
    case Bucket::Train: return "train";
    case Bucket::Validation: return "validation";
    case Bucket::Test: return "test";
  }
  return "?";
}

std::vector<std::string> SplitAssignment::ids(Bucket b) const {
  std::vector<std::string> out;
  for (const auto& [id, bk] : bucket)
    if (bk == b) out.push_back(id);
  return out;
}

std::size_t SplitAssignment::count(Bucket b) const {
  return static_cast<std::size_t>(
      std::count_if(bucket.begin(), bucket.end(), [b](const auto& kv) { return kv.second == b; }));
}

SplitAssignment split_corpus(const std::vector<CorpusEntry>& entries, std::uint64_t seed,
                             std::array<double, 3> fractions) {
  double total = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(total - 1.0) > 1e-9 || *std::min_element(fractions.begin(), fractions.end()) < 0)
    throw ConfigError("split fractions must be non-negative and sum to 1");

  std::map<std::string, std::vector<std::string>> strata;
  for (const auto& e : entries) strata[e.cwe].push_back(e.id);

  SplitAssignment split;
  std::uint64_t stratum_index = 0;
  for (auto& [cwe, ids] : strata) {
    std::sort(ids.begin(), ids.end());
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stratum_index++)};
    std::mt19937_64 rng(seq);
    std::shuffle(ids.begin(), ids.end(), rng);
    if (ids.size() < 3)
      split.warnings.push_back("EmptyStratum: " + cwe + " has only " + std::to_string(ids.size()) +
                               " entries");

    // Largest remainder; ties go to the earlier bucket.
    const double n = static_cast<double>(ids.size());
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> rema{};
    std::size_t assigned = 0;
    for (std::size_t b = 0; b < 3; ++b) {
      double q = n * fractions[b];
      sizes[b] = static_cast<std::size_t>(std::floor(q + 1e-9));
      rema[b] = q - static_cast<double>(sizes[b]);
      assigned += sizes[b];
    }
    std::array<std::size_t, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rema[a] > rema[b]; });
    for (std::size_t k = 0; assigned < ids.size(); ++k, ++assigned) ++sizes[order[k % 3]];

    std::size_t pos = 0;
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t k = 0; k < sizes[b]; ++k) split.bucket[ids[pos++]] = static_cast<Bucket>(b);
  }
  return split;
}

}  // namespace vulpath::corpus
