// vulpath: corpus ingestion, training, explanation, baselines and evaluation.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "vulpath/baselines/rules.hpp"
#include "vulpath/error.hpp"
#include "vulpath/eval/evaluate.hpp"
#include "vulpath/frontend/cpg_json.hpp"
#include "vulpath/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vulpath;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 0;

  std::uint64_t synth_seed = 42;
  int n = 1000;
  std::string out;
  std::string corpus_dir;
  std::string fn;
  std::string sink_model;
  std::string detector;
  std::string embedding_from;
  std::string method = "rules";
  std::string methods = "all";
  std::string table;
};

RunConfig effective_config(const Options& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  apply_environment(c);
  if (o.seed) c.seed = *o.seed;
  if (o.jobs > 0) c.jobs = o.jobs;
  std::cerr << "vulpath: seed " << c.seed << "\nvulpath: effective config " << config_to_json(c).dump() << "\n";
  return c;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& out, const json& doc) {
  if (out.empty() || out == "-") {
    std::cout << doc.dump(2) << "\n";
  } else {
    nn::write_json_file(out, doc, 2);
    std::cerr << "vulpath: wrote " << out << "\n";
  }
}

frontend::CodePropertyGraph load_function(const std::string& path) { return frontend::build_cpg(read_file(path)); }

Dataset load_dataset(const Options& o, const RunConfig& c) {
  Dataset data = prepare_dataset(corpus::ingest_directory(o.corpus_dir), c);
  for (const auto& s : data.skipped) std::cerr << "vulpath: skipped " << s.id << ": " << s.reason << "\n";
  std::cerr << "vulpath: " << data.functions.size() << " functions; train " << data.split.count(corpus::Bucket::Train)
            << ", validation " << data.split.count(corpus::Bucket::Validation) << ", test "
            << data.split.count(corpus::Bucket::Test) << "\n";
  for (const auto& w : data.split.warnings) std::cerr << "vulpath: warning: " << w << "\n";
  return data;
}

features::EmbeddingTable embedding_for(const Options& o, const Dataset& data, const RunConfig& c) {
  if (!o.embedding_from.empty()) {
    const json doc = nn::read_json_file(o.embedding_from);
    if (!doc.contains("embedding")) throw SchemaError("$.embedding", "missing required member");
    return features::embedding_from_json(doc.at("embedding"));
  }
  features::SkipGramStats stats;
  auto table = train_embedding(data, c, &stats);
  for (std::size_t e = 0; e < stats.epoch_loss.size(); ++e)
    std::cerr << "vulpath: embedding epoch " << e + 1 << " loss " << stats.epoch_loss[e] << "\n";
  return table;
}

void log_training(const char* what, const nn::TrainReport& r) {
  for (std::size_t e = 0; e < r.train_loss.size(); ++e) {
    std::cerr << "vulpath: " << what << " epoch " << e + 1 << " loss " << r.train_loss[e];
    if (e < r.validation_score.size()) std::cerr << " validation " << r.validation_score[e];
    std::cerr << "\n";
  }
  std::cerr << "vulpath: " << what << " best epoch " << r.best_epoch << "\n";
}

int cmd_synth(const Options& o) {
  const auto entries = corpus::generate_synthetic(o.n, o.synth_seed);
  corpus::write_bundle(o.out, entries);
  std::size_t vulnerable = 0;
  for (const auto& e : entries) vulnerable += e.vulnerable ? 1 : 0;
  std::cerr << "vulpath: wrote " << entries.size() << " functions (" << vulnerable << " vulnerable) to " << o.out
            << "\n";
  return 0;
}

int cmd_ingest(const Options& o) {
  const RunConfig c = effective_config(o);
  const Dataset data = load_dataset(o, c);
  json entries = json::array();
  for (const auto& f : data.functions) {
    json rec = corpus::manifest_record(f.entry);
    rec["bucket"] = std::string(corpus::to_string(data.split.bucket.at(f.entry.id)));
    rec["nodes"] = f.cpg.size();
    entries.push_back(std::move(rec));
  }
  json skipped = json::array();
  for (const auto& s : data.skipped) skipped.push_back({{"id", s.id}, {"reason", s.reason}});
  emit(o.out, {{"entries", std::move(entries)}, {"skipped", std::move(skipped)}, {"warnings", data.split.warnings}});
  return 0;
}

int cmd_graph(const Options& o) {
  emit(o.out, frontend::cpg_to_json(load_function(o.fn)));
  return 0;
}

int cmd_train_sink(const Options& o) {
  const RunConfig c = effective_config(o);
  const Dataset data = load_dataset(o, c);
  nn::TrainReport report;
  const auto ckpt = train_sink_model(data, embedding_for(o, data, c), c, &report);
  log_training("sink", report);
  const json doc = nn::to_json(ckpt);
  emit(o.out, doc);
  std::cerr << "vulpath: checkpoint digest " << nn::checkpoint_digest(doc) << "\n";
  return 0;
}

int cmd_train_detector(const Options& o) {
  const RunConfig c = effective_config(o);
  const Dataset data = load_dataset(o, c);
  nn::TrainReport report;
  const auto ckpt = train_detector_model(data, embedding_for(o, data, c), c, &report);
  log_training("detector", report);
  const json doc = nn::to_json(ckpt);
  emit(o.out, doc);
  std::cerr << "vulpath: checkpoint digest " << nn::checkpoint_digest(doc) << "\n";
  return 0;
}

int cmd_detect_sinks(const Options& o) {
  const RunConfig c = effective_config(o);
  const auto cpg = load_function(o.fn);
  const auto sink = nn::sink_checkpoint_from_json(nn::read_json_file(o.sink_model));
  const auto ranked = rank_statements(cpg, sink);
  json statements = json::array();
  for (const auto& p : ranked) statements.push_back({{"line", p.line}, {"node", p.node}, {"p_sink", p.probability}});
  json psp = json::array();
  for (const auto& p : potential_sinks(ranked, c.sink.threshold)) psp.push_back(p.line);
  emit(o.out, {{"function", cpg.function_name},
               {"threshold", c.sink.threshold},
               {"potential_sinks", std::move(psp)},
               {"statements", std::move(statements)}});
  return 0;
}

int cmd_explain(const Options& o) {
  const RunConfig c = effective_config(o);
  const auto cpg = load_function(o.fn);
  const auto sink = nn::sink_checkpoint_from_json(nn::read_json_file(o.sink_model));
  const auto detector = nn::detector_checkpoint_from_json(nn::read_json_file(o.detector));
  json doc = ranker::explanation_json(explain_function(cpg, sink, detector, c));
  doc["method"] = "vulpathfinder";
  emit(o.out, doc);
  return 0;
}

int cmd_baseline(const Options& o) {
  const RunConfig c = effective_config(o);
  const auto cpg = load_function(o.fn);
  const auto detector = nn::detector_checkpoint_from_json(nn::read_json_file(o.detector));
  json doc;
  if (o.method == "rules") {
    baselines::RuleConfig rc{c.baselines.api_list};
    json hits = json::array();
    for (const auto& h : baselines::rule_based_sinks(cpg, rc))
      hits.push_back({{"node", h.node}, {"line", h.line}, {"rule", std::string(baselines::to_string(h.rule))}});
    doc = ranker::explanation_json(explain_rules(cpg, detector, c));
    doc["hits"] = std::move(hits);
  } else if (o.method == "edge_mask") {
    const auto r = explain_edge_mask(cpg, detector, c);
    json edges = json::array();
    for (const auto& m : r.edges)
      edges.push_back({{"src", m.edge.src},
                       {"dst", m.edge.dst},
                       {"kind", std::string(frontend::to_string(m.edge.kind))},
                       {"mask", m.mask}});
    doc = {{"function", cpg.function_name},
           {"p_G", r.original_probability},
           {"p_masked", r.masked_probability},
           {"lines", r.lines},
           {"edges", std::move(edges)}};
  } else {
    throw ConfigError("--method must be rules or edge_mask");
  }
  doc["method"] = o.method;
  emit(o.out, doc);
  return 0;
}

std::vector<std::string> parse_methods(const std::string& list) {
  if (list == "all") return eval::kMethods;
  std::vector<std::string> out;
  std::stringstream ss(list);
  for (std::string m; std::getline(ss, m, ',');)
    if (!m.empty()) out.push_back(m == "rules" ? "rules+slicing" : m);
  if (out.empty()) throw ConfigError("--methods is empty");
  return out;
}

int cmd_eval(const Options& o) {
  const RunConfig c = effective_config(o);
  const auto methods = parse_methods(o.methods);
  const Dataset data = load_dataset(o, c);
  nn::SinkCheckpoint sink;
  nn::DetectorCheckpoint detector;
  std::optional<features::EmbeddingTable> table;
  auto shared_table = [&]() -> const features::EmbeddingTable& {
    if (!table) table = embedding_for(o, data, c);
    return *table;
  };
  if (!o.sink_model.empty()) {
    sink = nn::sink_checkpoint_from_json(nn::read_json_file(o.sink_model));
  } else {
    nn::TrainReport r;
    sink = train_sink_model(data, shared_table(), c, &r);
    log_training("sink", r);
  }
  if (!o.detector.empty()) {
    detector = nn::detector_checkpoint_from_json(nn::read_json_file(o.detector));
  } else {
    nn::TrainReport r;
    detector = train_detector_model(data, shared_table(), c, &r);
    log_training("detector", r);
  }
  const auto report = eval::evaluate_corpus(data, methods, sink, detector, c);
  const std::string table_text = eval::report_table(report);
  std::cout << table_text;
  if (!o.table.empty()) {
    std::ofstream t(o.table);
    if (!t) throw Error("cannot write " + o.table);
    t << table_text;
  }
  if (!o.out.empty()) emit(o.out, eval::report_json(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vulpath: explainable vulnerability path discovery over code property graphs"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed_flag = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed_flag, "override the configured seed");
    sub->add_option("--jobs", o.jobs, "worker threads for per-function work")->check(CLI::PositiveNumber);
  };

  auto* synth = app.add_subcommand("synth", "generate a synthetic labeled corpus bundle");
  synth->add_option("--n", o.n, "number of functions")->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", o.synth_seed, "generator seed");
  synth->add_option("--out", o.out, "output directory")->required();

  auto* ingest = app.add_subcommand("ingest", "validate a corpus bundle, deduplicate and split it");
  common(ingest);
  ingest->add_option("--corpus", o.corpus_dir, "corpus directory holding manifest.jsonl")->required();
  ingest->add_option("--out", o.out, "output JSON (stdout when omitted)");

  auto* graph = app.add_subcommand("graph", "emit the code property graph of one function as JSON");
  graph->add_option("--fn", o.fn, "C source file with one function")->required()->check(CLI::ExistingFile);
  graph->add_option("--out", o.out, "output JSON (stdout when omitted)");

  auto* train_sink = app.add_subcommand("train-sink", "train the embedding and the sink classifier");
  common(train_sink);
  train_sink->add_option("--corpus", o.corpus_dir, "corpus directory")->required();
  train_sink->add_option("--embedding-from", o.embedding_from, "reuse the embedding stored in a checkpoint");
  train_sink->add_option("--out", o.out, "checkpoint path")->required();

  auto* train_det = app.add_subcommand("train-detector", "train the graph-level detector");
  common(train_det);
  train_det->add_option("--corpus", o.corpus_dir, "corpus directory")->required();
  train_det->add_option("--embedding-from", o.embedding_from, "reuse the embedding stored in a checkpoint");
  train_det->add_option("--out", o.out, "checkpoint path")->required();

  auto* detect = app.add_subcommand("detect-sinks", "score every statement of one function as a sink");
  common(detect);
  detect->add_option("--fn", o.fn, "C source file")->required()->check(CLI::ExistingFile);
  detect->add_option("--sink-model", o.sink_model, "sink checkpoint")->required()->check(CLI::ExistingFile);
  detect->add_option("--out", o.out, "output JSON (stdout when omitted)");

  auto* explain = app.add_subcommand("explain", "report the most important source-to-sink path");
  common(explain);
  explain->add_option("--fn", o.fn, "C source file")->required()->check(CLI::ExistingFile);
  explain->add_option("--sink-model", o.sink_model, "sink checkpoint")->required()->check(CLI::ExistingFile);
  explain->add_option("--detector", o.detector, "detector checkpoint")->required()->check(CLI::ExistingFile);
  explain->add_option("--out", o.out, "output JSON (stdout when omitted)");

  auto* baseline = app.add_subcommand("baseline", "run a baseline explainer on one function");
  common(baseline);
  baseline->add_option("--fn", o.fn, "C source file")->required()->check(CLI::ExistingFile);
  baseline->add_option("--method", o.method, "rules or edge_mask")->check(CLI::IsMember({"rules", "edge_mask"}));
  baseline->add_option("--detector", o.detector, "detector checkpoint")->required()->check(CLI::ExistingFile);
  baseline->add_option("--out", o.out, "output JSON (stdout when omitted)");

  auto* evaluate = app.add_subcommand("eval", "evaluate all methods on the test split");
  common(evaluate);
  evaluate->add_option("--corpus", o.corpus_dir, "corpus directory")->required();
  evaluate->add_option("--methods", o.methods, "all, or a comma list of vulpathfinder,rules,edge_mask");
  evaluate->add_option("--sink-model", o.sink_model, "sink checkpoint (trained when omitted)")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--detector", o.detector, "detector checkpoint (trained when omitted)")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--embedding-from", o.embedding_from, "reuse the embedding stored in a checkpoint");
  evaluate->add_option("--out", o.out, "report JSON");
  evaluate->add_option("--table", o.table, "also write the text summary here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      if (sub->get_option_no_throw("--seed") && sub != synth && sub->count("--seed")) o.seed = seed_flag;
      const std::string name = sub->get_name();
      if (name == "synth") return cmd_synth(o);
      if (name == "ingest") return cmd_ingest(o);
      if (name == "graph") return cmd_graph(o);
      if (name == "train-sink") return cmd_train_sink(o);
      if (name == "train-detector") return cmd_train_detector(o);
      if (name == "detect-sinks") return cmd_detect_sinks(o);
      if (name == "explain") return cmd_explain(o);
      if (name == "baseline") return cmd_baseline(o);
      if (name == "eval") return cmd_eval(o);
    }
    return 1;
  } catch (const Error& e) {
    std::cerr << "vulpath: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "vulpath: internal error: " << e.what() << "\n";
    return 2;
  } catch (...) {
    std::cerr << "vulpath: internal error\n";
    return 2;
  }
}
