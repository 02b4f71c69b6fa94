#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vulpath/frontend/cpg.hpp"

namespace vulpath::corpus {

/// One labeled function. `sink_lines` are 1-based source lines of the
/// statements that trigger the vulnerability; empty iff not vulnerable.
struct CorpusEntry {
  std::string id;
  std::string file;
  std::string cwe;
  std::string source;
  bool vulnerable = false;
  std::vector<int> sink_lines;
  std::string md5;
};

/// Comment-stripped source with whitespace removed except where it separates
/// two word characters. String and character literals are kept verbatim.
std::string normalize_source(std::string_view source);
std::string source_digest(std::string_view source);

/// Reads `root/manifest.jsonl` and the `.c` files it names.
std::vector<CorpusEntry> ingest_directory(const std::filesystem::path& root);
/// Writes a corpus bundle: one `.c` file per entry plus `manifest.jsonl`.
void write_bundle(const std::filesystem::path& root, const std::vector<CorpusEntry>& entries);

nlohmann::json manifest_record(const CorpusEntry& entry);

/// Keeps the first entry per digest, preserving order.
std::vector<CorpusEntry> dedup_md5(std::vector<CorpusEntry> entries);

/// Per-node labels indexed like `cpg.nodes`: 1 sink, 0 non-sink, -1 for
/// nodes outside the classification target (non-statements).
std::vector<int> align_labels(const CorpusEntry& entry, const frontend::CodePropertyGraph& cpg);

enum class Bucket : std::uint8_t { Train, Validation, Test };
std::string_view to_string(Bucket b);

struct SplitAssignment {
  std::map<std::string, Bucket> bucket;
  std::vector<std::string> warnings;

  std::vector<std::string> ids(Bucket b) const;
  std::size_t count(Bucket b) const;
};

/// Stratified (per CWE tag), seeded split. Per-stratum bucket sizes use
/// largest-remainder rounding of `n * fraction`.
SplitAssignment split_corpus(const std::vector<CorpusEntry>& entries, std::uint64_t seed,
                             std::array<double, 3> fractions = {0.7, 0.1, 0.2});

/// Desk-scale stand-in corpus of buffer-copy functions; see synth.cpp.
std::vector<CorpusEntry> generate_synthetic(int n, std::uint64_t seed);

}  // namespace vulpath::corpus
