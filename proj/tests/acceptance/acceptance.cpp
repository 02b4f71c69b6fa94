// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "vulpath/eval/evaluate.hpp"
#include "vulpath/frontend/cpg.hpp"
#include "vulpath/nn/gradcheck.hpp"
#include "vulpath/pipeline.hpp"
#include "vulpath/slicer/slicer.hpp"

using namespace vulpath;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

int failures = 0;

void report(int id, const Outcome& o, double secs) {
  std::printf("criterion %d: %s (%.1f s) %s\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

void run(int id, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(id, o, seconds_since(start));
}

Outcome numeric_oracles() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 16;
    const auto g = oracle::random_cpg(n, rng);
    const bool bn = t % 3 != 0, residual = t % 4 == 0, relu = t % 5 != 0;
    const int in = 5, out = residual ? 5 : 4;
    nn::GcnLayerParams layer = oracle::random_layer(in, out, bn, rng);
    const nn::Matrix h = oracle::random_matrix(n, in, rng);
    const nn::Matrix s = oracle::dense_normalized_adjacency(g);
    nn::GcnOptions o;
    o.relu = relu;
    o.residual = residual;
    const auto sparse = nn::normalized_adjacency_sparse(g);
    worst = std::max(worst, (nn::Matrix(sparse) - s).cwiseAbs().maxCoeff());
    const nn::Matrix eval = nn::gcn_forward(h, sparse, std::as_const(layer), o);
    worst = std::max(worst, (eval - oracle::dense_gcn(h, s, layer, false, relu, residual)).cwiseAbs().maxCoeff());
    const nn::Matrix train = nn::gcn_forward(h, sparse, layer, o, nn::Mode::Train);
    worst = std::max(worst, (train - oracle::dense_gcn(h, s, layer, true, relu, residual)).cwiseAbs().maxCoeff());
  }

  const auto g = oracle::random_cpg(10, rng);
  std::vector<int> labels(10, 0);
  labels[3] = labels[7] = 1;
  const auto sample = nn::make_sample(g, oracle::random_matrix(10, 128, rng), labels, 1);
  const auto sink = nn::finite_diff_check(nn::SinkModel::create({}, 7), sample);
  const auto det = nn::finite_diff_check(nn::DetectorModel::create({}, 7), sample);
  const double secs = seconds_since(start);
  const bool pass = worst <= 1e-6 && sink.passed && det.passed && secs < 60;
  return {pass, "gcn max abs diff " + fmt("%.2e", worst) + "; gradient rel err sink " +
                    fmt("%.2e", sink.max_relative_error) + ", detector " + fmt("%.2e", det.max_relative_error)};
}

Outcome static_oracles() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2);
  int pdom_bad = 0, slice_bad = 0, path_bad = 0;
  std::size_t paths_seen = 0;
  for (int t = 0; t < 500; ++t) {
    std::uniform_int_distribution<int> size(2, 12);
    const auto fg = oracle::random_flow_graph(size(rng), rng);
    if (frontend::post_dominators(fg) != oracle::brute_ipdom(fg)) ++pdom_bad;

    std::uniform_int_distribution<int> dsize(1, 12);
    const int n = dsize(rng);
    const auto g = oracle::random_dependence_dag(n, rng);
    const int sink = std::uniform_int_distribution<int>(0, n - 1)(rng);
    if (slicer::backward_slice(g, sink) != oracle::brute_slice(g, sink)) ++slice_bad;
    std::set<std::vector<int>> got;
    const auto paths = slicer::enumerate_paths(g, sink, {1000, 1000000});
    for (const auto& p : paths) got.insert(p.nodes);
    paths_seen += paths.size();
    if (got.size() != paths.size() || got != oracle::brute_paths(g, sink)) ++path_bad;
  }
  const double secs = seconds_since(start);
  return {pdom_bad == 0 && slice_bad == 0 && path_bad == 0 && secs < 60,
          "500 graphs: post-dominator mismatches " + std::to_string(pdom_bad) + ", slice mismatches " +
              std::to_string(slice_bad) + ", path-set mismatches " + std::to_string(path_bad) + " (" +
              std::to_string(paths_seen) + " paths)"};
}

/// Everything criteria 3 to 5 produce, kept for the determinism check.
struct PipelineRun {
  Outcome sink, tlc, example;
  double sink_secs = 0, tlc_secs = 0, example_secs = 0;
  std::string sink_digest, detector_digest;
  std::string eval_report, example_report;
};

PipelineRun run_pipeline(const fs::path& work, bool keep) {
  PipelineRun r;
  const RunConfig config;
  Dataset data;
  nn::SinkCheckpoint sink;
  nn::DetectorCheckpoint detector;
  features::EmbeddingTable table;

  auto start = Clock::now();
  try {
    const fs::path corpus_dir = work / "corpus";
    fs::remove_all(corpus_dir);
    corpus::write_bundle(corpus_dir, corpus::generate_synthetic(1000, 42));
    data = prepare_dataset(corpus::ingest_directory(corpus_dir), config);
    table = train_embedding(data, config);
    nn::TrainReport train;
    sink = train_sink_model(data, table, config, &train);
    const auto test = make_samples(data.bucket(corpus::Bucket::Test), table);
    std::vector<int> labels;
    const auto predicted = nn::predict_sink_labels(sink.model, test, &labels);
    const auto m = eval::node_metrics(predicted, labels);
    const auto doc = nn::to_json(sink);
    r.sink_digest = nn::checkpoint_digest(doc);
    if (keep) nn::write_json_file(work / "sink.json", doc);
    r.sink_secs = seconds_since(start);
    r.sink = {m.recall >= 0.90 && m.precision >= 0.80 && r.sink_secs < 900,
              "split " + std::to_string(data.split.count(corpus::Bucket::Train)) + "/" +
                  std::to_string(data.split.count(corpus::Bucket::Validation)) + "/" +
                  std::to_string(data.split.count(corpus::Bucket::Test)) + ", test sink precision " +
                  fmt("%.4f", m.precision) + " recall " + fmt("%.4f", m.recall) + " f1-macro " +
                  fmt("%.4f", m.f1_macro) + ", best epoch " + std::to_string(train.best_epoch)};
  } catch (const std::exception& e) {
    r.sink = {false, std::string("exception: ") + e.what()};
    r.sink_secs = seconds_since(start);
    r.tlc = r.example = {false, "skipped: sink stage failed"};
    return r;
  }

  start = Clock::now();
  try {
    detector = train_detector_model(data, table, config);
    const auto doc = nn::to_json(detector);
    r.detector_digest = nn::checkpoint_digest(doc);
    if (keep) nn::write_json_file(work / "detector.json", doc);
    const auto ev = eval::evaluate_corpus(data, eval::kMethods, sink, detector, config);
    const auto report_doc = eval::report_json(ev);
    r.eval_report = report_doc.dump();
    if (keep) nn::write_json_file(work / "eval.json", report_doc, 2);
    const double vp = ev.mean_tlc.at("vulpathfinder"), rules = ev.mean_tlc.at("rules+slicing"),
                 mask = ev.mean_tlc.at("edge_mask");
    r.tlc_secs = seconds_since(start);
    r.tlc = {vp >= rules && vp >= mask && vp >= 0.90 && r.tlc_secs < 900,
             "mean TLC over " + std::to_string(ev.vulnerable_functions) + " functions: vulpathfinder " +
                 fmt("%.4f", vp) + ", rules+slicing " + fmt("%.4f", rules) + ", edge_mask " + fmt("%.4f", mask) +
                 "; detector accuracy " + fmt("%.4f", ev.detector_accuracy)};
  } catch (const std::exception& e) {
    r.tlc = {false, std::string("exception: ") + e.what()};
    r.tlc_secs = seconds_since(start);
    r.example = {false, "skipped: detector stage failed"};
    return r;
  }

  start = Clock::now();
  try {
    const auto cpg = frontend::build_cpg(oracle::example_source());
    const auto ex = explain_function(cpg, sink, detector, config);
    const auto doc = ranker::explanation_json(ex);
    r.example_report = doc.dump();
    if (keep) nn::write_json_file(work / "example_explanation.json", doc, 2);
    const auto& lines = ex.chosen.path.lines;
    const double score = eval::tlc({lines.begin(), lines.end()}, {8});
    std::string shown;
    for (int l : lines) shown += (shown.empty() ? "" : " -> ") + std::to_string(l);
    r.example = {!lines.empty() && lines.back() == 8 && score == 1.0,
                 "chosen path " + shown + ", TLC " + fmt("%.2f", score) + ", IS " + fmt("%.4f", ex.chosen.importance)};
  } catch (const std::exception& e) {
    r.example = {false, std::string("exception: ") + e.what()};
  }
  r.example_secs = seconds_since(start);
  return r;
}

Outcome importance_formula() {
  struct Row {
    double p_G, p_g, expected;
  };
  const Row table[20] = {{0.9, 0.9, 1.0},   {0.9, 0.7, 0.8},    {0.5, 0.6, 1.1},   {0.0, 0.0, 1.0},
                         {1.0, 0.0, 0.0},   {0.0, 1.0, 2.0},    {0.25, 0.5, 1.25}, {0.75, 0.25, 0.5},
                         {0.6, 0.61, 1.01}, {0.99, 0.01, 0.02}, {0.3, 0.9, 1.6},   {0.5, 0.5, 1.0},
                         {0.8, 0.2, 0.4},   {0.1, 0.35, 1.25},  {0.42, 0.4, 0.98}, {0.05, 0.95, 1.9},
                         {0.7, 0.0, 0.3},   {0.33, 0.66, 1.33}, {1.0, 1.0, 1.0},   {0.2, 0.21, 1.01}};
  int above_one = 0, bad = 0;
  for (const auto& t : table) {
    const double is = ranker::importance_score(t.p_G, t.p_g);
    if (is != 1.0 - (t.p_G - t.p_g) || std::abs(is - t.expected) > 1e-12) ++bad;
    if (is > 1.0) ++above_one;
  }
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatched = 0;
  for (int s = 0; s < 100; ++s) {
    const double p_G = u(rng);
    const int n = 1 + static_cast<int>(u(rng) * 15);
    std::vector<ranker::ScoredPath> paths;
    std::size_t best = 0;
    for (int i = 0; i < n; ++i) {
      ranker::ScoredPath p;
      p.path.nodes = {i, 100};
      p.path.lines = {i + 1, 101};
      p.path.sink = 100;
      p.p_g = u(rng);
      p.importance = ranker::importance_score(p_G, p.p_g);
      if (p.p_g > (paths.empty() ? -1.0 : paths[best].p_g)) best = paths.size();
      paths.push_back(p);
    }
    if (!(ranker::rank_scored("f", p_G, paths).chosen.path == paths[best].path)) ++mismatched;
  }
  return {bad == 0 && above_one > 0 && mismatched == 0,
          "20 pairs, " + std::to_string(bad) + " formula mismatches, " + std::to_string(above_one) +
              " with IS > 1; argmax disagreements on 100 sets: " + std::to_string(mismatched)};
}

std::string first_difference(const PipelineRun& a, const PipelineRun& b) {
  if (a.sink_digest != b.sink_digest) return "sink checkpoint digest differs";
  if (a.detector_digest != b.detector_digest) return "detector checkpoint digest differs";
  if (a.eval_report != b.eval_report) return "evaluation report differs";
  if (a.example_report != b.example_report) return "worked example explanation differs";
  return "";
}

Outcome corpus_hygiene() {
  const auto base = corpus::generate_synthetic(1000, 42);
  std::vector<corpus::CorpusEntry> mixed = base;
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> pick(0, base.size() - 1);
  const int injected = 300;
  for (int i = 0; i < injected; ++i) {
    corpus::CorpusEntry e = base[pick(rng)];
    e.id = "dup-" + std::to_string(i);
    switch (i % 3) {
      case 0:
        break;
      case 1: {
        std::string spaced;
        for (char c : e.source) spaced += c == '\n' ? std::string("  \n\n\t") : std::string(1, c);
        e.source = "  " + spaced + "\n\n";
        break;
      }
      case 2:
        e.source = "/* duplicated variant */\n" + e.source + "  // trailing note\n";
        break;
    }
    e.md5 = corpus::source_digest(e.source);
    mixed.insert(mixed.begin() + static_cast<std::ptrdiff_t>(pick(rng)), e);
  }
  // Injected copies are inserted anywhere, so the survivor of each group is
  // whichever came first; compare digests instead of ids.
  const auto kept = corpus::dedup_md5(mixed);
  std::set<std::string> want, got;
  for (const auto& e : base) want.insert(e.md5);
  for (const auto& e : kept) got.insert(e.md5);
  const bool dedup_ok = kept.size() == base.size() && got == want && corpus::dedup_md5(kept).size() == kept.size();

  const auto split = corpus::split_corpus(kept, 42);
  std::map<std::string, std::array<int, 3>> per;
  std::map<std::string, int> total;
  for (const auto& e : kept) {
    ++per[e.cwe][static_cast<int>(split.bucket.at(e.id))];
    ++total[e.cwe];
  }
  double worst = 0;
  std::string strata;
  for (const auto& [cwe, n] : total) {
    const double want_sizes[3] = {0.7 * n, 0.1 * n, 0.2 * n};
    for (int b = 0; b < 3; ++b) worst = std::max(worst, std::abs(per[cwe][b] - want_sizes[b]));
    strata += " " + cwe + " " + std::to_string(per[cwe][0]) + "/" + std::to_string(per[cwe][1]) + "/" +
              std::to_string(per[cwe][2]);
  }
  return {dedup_ok && worst <= 1.0 && split.bucket.size() == kept.size(),
          std::to_string(mixed.size()) + " entries with " + std::to_string(injected) + " injected duplicates -> " +
              std::to_string(kept.size()) + " kept; split max deviation " + fmt("%.2f", worst) + ";" + strata};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria runner"};
  std::string work = (fs::temp_directory_path() / "vulpath_acceptance").string();
  app.add_option("--work", work, "directory for the corpus and trained artifacts");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);

  run(1, numeric_oracles);
  run(2, static_oracles);

  const PipelineRun first = run_pipeline(fs::path(work) / "run1", true);
  report(3, first.sink, first.sink_secs);
  report(4, first.tlc, first.tlc_secs);
  report(5, first.example, first.example_secs);

  run(6, importance_formula);

  run(7, [&] {
    const PipelineRun second = run_pipeline(fs::path(work) / "run2", false);
    const bool ran = !first.sink_digest.empty() && !first.detector_digest.empty() && !first.example_report.empty();
    const std::string diff = ran ? first_difference(first, second) : "first run incomplete";
    return Outcome{diff.empty(), diff.empty() ? "sink " + first.sink_digest + ", detector " + first.detector_digest +
                                                    ", evaluation and worked example reports identical"
                                              : diff};
  });

  run(8, corpus_hygiene);

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
