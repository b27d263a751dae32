// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include "lcr/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lcr/confidence.hpp"
#include "lcr/evaluation.hpp"
#include "lcr/rerank.hpp"
#include "sha256.hpp"

namespace lcr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  if (path.empty()) {
    return path;
  }
  fs::path p(path);
  if (p.is_absolute()) {
    return p.lexically_normal().string();
  }
  return (fs::path(base_dir) / p).lexically_normal().string();
}

std::string fmt(double v, int decimals = 6) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, v);
  return buffer;
}

std::optional<std::string> read_env(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') {
    return std::nullopt;
  }
  return std::string(value);
}

QrelsFormat parse_qrels_format(const std::string& text) {
  if (text == "beir_tsv") {
    return QrelsFormat::beir_tsv;
  }
  if (text == "trec4col") {
    return QrelsFormat::trec4col;
  }
  throw_error(ErrorCode::invalid_config, "unknown qrels format '" + text + "'");
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) {
    throw_error(ErrorCode::invalid_config, "no " + what + " path configured");
  }
  if (!fs::exists(path)) {
    throw_error(ErrorCode::io_error, what + " '" + path + "' does not exist");
  }
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j, const std::string& base_dir) {
  PipelineConfig config;
  const json dataset = j.value("dataset", json::object());
  config.corpus_path = resolve_path(base_dir, dataset.value("corpus", ""));
  config.queries_path = resolve_path(base_dir, dataset.value("queries", ""));
  config.qrels_path = resolve_path(base_dir, dataset.value("qrels", ""));
  config.qrels_format = parse_qrels_format(dataset.value("qrels_format", "beir_tsv"));

  const json backend = j.value("backend", json::object());
  const std::string kind = backend.value("kind", "scripted");
  if (kind == "scripted") {
    config.backend.kind = BackendKind::scripted;
  } else if (kind == "remote") {
    config.backend.kind = BackendKind::remote;
  } else {
    throw_error(ErrorCode::invalid_config, "unknown backend kind '" + kind + "'");
  }
  config.backend.model = backend.value("model", "");
  config.backend.endpoint = backend.value("endpoint", "");
  config.backend.api_key = backend.value("api_key", "");
  config.backend.api_key_env = backend.value("api_key_env", "LCR_API_KEY");
  config.backend.in_flight_limit = backend.value("in_flight_limit", 8);
  config.backend.fixtures_path = resolve_path(base_dir, backend.value("fixtures", ""));

  const json lcr = j.value("lcr", json::object());
  config.lcr.t_query = lcr.value("t_query", 0.5);
  config.lcr.t_upper = lcr.value("t_upper", 0.9);
  config.lcr.t_lower = lcr.value("t_lower", 0.4);
  config.lcr.k_samples = lcr.value("k_samples", 10);
  config.lcr.temperature = lcr.value("temperature", 1.0);
  config.lcr.query_threshold_enabled = lcr.value("query_threshold_enabled", true);
  config.lcr.validate();

  const json bm25 = j.value("bm25", json::object());
  config.bm25.k1 = bm25.value("k1", 0.9);
  config.bm25.b = bm25.value("b", 0.4);
  if (!(config.bm25.k1 > 0.0) || config.bm25.b < 0.0 || config.bm25.b > 1.0) {
    throw_error(ErrorCode::invalid_config, "bm25 requires k1 > 0 and b in [0, 1]");
  }

  config.retrieve_k = j.value("retrieve_k", 10);
  config.eval_k = j.value("eval_k", 5);
  if (config.retrieve_k < 1 || config.eval_k < 1) {
    throw_error(ErrorCode::invalid_config, "retrieve_k and eval_k must be >= 1");
  }

  config.output_dir = resolve_path(base_dir, j.value("output_dir", "out"));
  config.cache_path = resolve_path(base_dir, j.value("cache", "lcr_cache.jsonl"));
  config.index_path = j.contains("index")
                          ? resolve_path(base_dir, j.at("index").get<std::string>())
                          : (fs::path(config.output_dir) / "index.bin").string();
  config.input_run = j.contains("input_run")
                         ? resolve_path(base_dir, j.at("input_run").get<std::string>())
                         : (fs::path(config.output_dir) / "run_bm25.trec").string();
  if (j.contains("sweep") && j.at("sweep").contains("fixed_qt") &&
      !j.at("sweep").at("fixed_qt").is_null()) {
    config.sweep_fixed_qt = j.at("sweep").at("fixed_qt").get<double>();
  }
  return config;
}

BackendSettings resolve_backend_env(BackendSettings settings) {
  if (auto endpoint = read_env("LCR_ENDPOINT")) {
    settings.endpoint = *endpoint;
  }
  if (auto model = read_env("LCR_MODEL")) {
    settings.model = *model;
  }
  if (!settings.api_key_env.empty()) {
    if (auto key = read_env(settings.api_key_env.c_str())) {
      settings.api_key = *key;
    }
  }
  return settings;
}

Pipeline::Pipeline(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in.is_open()) {
    throw_error(ErrorCode::io_error, "cannot open config file '" + config_path + "'");
  }
  effective_ = json::parse(in, nullptr, false);
  if (effective_.is_discarded() || !effective_.is_object()) {
    throw_error(ErrorCode::invalid_config, "config file '" + config_path + "' is not a JSON object");
  }
  base_dir_ = fs::absolute(fs::path(config_path)).parent_path().string();
  materialize();  // validate eagerly so open fails fast on bad configs
}

void Pipeline::set_option(const std::string& dotted_key, const std::string& value) {
  if (dotted_key.empty()) {
    throw_error(ErrorCode::invalid_config, "override key must be nonempty");
  }
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) {
    parsed = value;  // plain string
  }
  json* node = &effective_;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string part = dotted_key.substr(start, dot - start);
    if (part.empty()) {
      throw_error(ErrorCode::invalid_config, "override key '" + dotted_key + "' is malformed");
    }
    if (dot == std::string::npos) {
      (*node)[part] = std::move(parsed);
      break;
    }
    node = &(*node)[part];
    if (!node->is_object()) {
      *node = json::object();
    }
    start = dot + 1;
  }
  materialize();  // re-validate with the override applied
}

PipelineConfig Pipeline::materialize() const {
  return PipelineConfig::from_json(effective_, base_dir_);
}

std::string Pipeline::config_hash() const { return sha256_hex(effective_.dump()); }

std::shared_ptr<LlmBackend> Pipeline::make_backend(const BackendSettings& raw) const {
  const BackendSettings settings = resolve_backend_env(raw);
  if (settings.kind == BackendKind::scripted) {
    require_file(settings.fixtures_path, "fixtures file");
    return ScriptedBackend::from_file(settings.fixtures_path,
                                      settings.model.empty() ? "scripted" : settings.model);
  }
  RemoteSettings remote;
  remote.endpoint = settings.endpoint;
  remote.api_key = settings.api_key;
  remote.model = settings.model;
  remote.in_flight_limit = settings.in_flight_limit;
  return std::make_shared<RemoteBackend>(remote);
}

void Pipeline::ensure_output_dir(const PipelineConfig& config) const {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) {
    throw_error(ErrorCode::io_error,
                "cannot create output directory '" + config.output_dir + "': " + ec.message());
  }
}

std::string Pipeline::cmd_index(bool force) {
  const PipelineConfig config = materialize();
  require_file(config.corpus_path, "corpus file");
  ensure_output_dir(config);
  if (fs::exists(config.index_path) && !force) {
    throw_error(ErrorCode::already_exists,
                "index file '" + config.index_path + "' already exists; pass --force to rebuild");
  }

  const CorpusMap corpus = load_corpus(config.corpus_path);
  std::vector<Document> docs;
  docs.reserve(corpus.size());
  for (const auto& [_, doc] : corpus) {
    docs.push_back(doc);
  }
  const InvertedIndex index = InvertedIndex::build(docs);
  index.save(config.index_path);

  std::ostringstream report;
  report << "indexed " << index.doc_count() << " documents (" << index.term_count()
         << " terms) -> " << config.index_path;
  return report.str();
}

std::string Pipeline::cmd_retrieve(int k) {
  const PipelineConfig config = materialize();
  if (k <= 0) {
    k = config.retrieve_k;
  }
  require_file(config.index_path, "index file");
  require_file(config.queries_path, "queries file");
  ensure_output_dir(config);

  const InvertedIndex index = InvertedIndex::load(config.index_path);
  const QueryMap queries = load_queries(config.queries_path);

  std::map<std::string, ScoredList> run;
  int empty_results = 0;
  for (const auto& [query_id, query] : queries) {
    ScoredList list = retrieve_top_k(index, config.bm25, query, k);
    if (list.entries.empty()) {
      ++empty_results;
      continue;
    }
    run.emplace(query_id, std::move(list));
  }
  if (run.empty()) {
    throw_error(ErrorCode::empty_input, "no query matched any document");
  }
  const std::string run_path = (fs::path(config.output_dir) / "run_bm25.trec").string();
  write_run(run, "bm25", run_path);

  std::ostringstream report;
  report << "retrieved top-" << k << " for " << run.size() << " of " << queries.size()
         << " queries -> " << run_path;
  if (empty_results > 0) {
    report << " (" << empty_results << " queries without hits omitted)";
  }
  return report.str();
}

std::string Pipeline::cmd_rerank(const std::string& input_run_path, bool fail_fast) {
  const PipelineConfig config = materialize();
  const std::string run_path = input_run_path.empty() ? config.input_run : input_run_path;
  require_file(run_path, "input run file");
  require_file(config.corpus_path, "corpus file");
  require_file(config.queries_path, "queries file");
  ensure_output_dir(config);

  const CorpusMap corpus = load_corpus(config.corpus_path);
  const QueryMap queries = load_queries(config.queries_path);
  const std::map<std::string, ScoredList> run = load_run(run_path);

  auto cache = std::make_shared<CacheStore>(config.cache_path);
  LlmService service(make_backend(config.backend), cache);

  std::vector<RerankOutcome> outcomes;
  std::vector<std::pair<std::string, std::string>> failures;
  int gated_count = 0;
  for (const auto& [query_id, list] : run) {
    try {
      auto query_it = queries.find(query_id);
      if (query_it == queries.end()) {
        throw_error(ErrorCode::missing_query,
                    "query '" + query_id + "' from the run is absent from the query set");
      }
      RerankOutcome outcome = rerank_query(service, query_it->second, list, corpus, config.lcr,
                                           config.backend.in_flight_limit);
      gated_count += outcome.gated ? 1 : 0;
      outcomes.push_back(std::move(outcome));
    } catch (const Error& error) {
      if (fail_fast) {
        throw;
      }
      failures.emplace_back(query_id, error.what());
    }
  }
  failed_queries_ = static_cast<int>(failures.size());
  if (outcomes.empty()) {
    throw_error(ErrorCode::empty_input, "every query failed during reranking");
  }

  const std::string out_run = (fs::path(config.output_dir) / "run_lcr.trec").string();
  const std::string out_diag = (fs::path(config.output_dir) / "rerank_diagnostics.jsonl").string();
  write_run(outcomes, "lcr", out_run);
  write_diagnostics(outcomes, config_hash(), out_diag);

  std::ostringstream report;
  report << "reranked " << outcomes.size() << " queries (" << gated_count
         << " kept their original ranking) -> " << out_run << "\ndiagnostics -> " << out_diag;
  if (service.unparsed_label_count() > 0) {
    report << "\n" << service.unparsed_label_count()
           << " entailment responses carried no label keyword (treated as neutral)";
  }
  if (!failures.empty()) {
    report << "\n" << failures.size() << " queries failed:";
    for (const auto& [query_id, message] : failures) {
      report << "\n  " << query_id << ": " << message;
    }
  }
  return report.str();
}

std::string Pipeline::cmd_eval(const std::string& run_path, const std::string& qrels_path, int k,
                               bool per_query) {
  const PipelineConfig config = materialize();
  const std::string run_file =
      run_path.empty() ? (fs::path(config.output_dir) / "run_lcr.trec").string() : run_path;
  const std::string qrels_file = qrels_path.empty() ? config.qrels_path : qrels_path;
  if (k <= 0) {
    k = config.eval_k;
  }
  require_file(run_file, "run file");
  require_file(qrels_file, "qrels file");
  ensure_output_dir(config);

  const auto run = load_run(run_file);
  const QrelsTable qrels = qrels_to_table(load_qrels(qrels_file, config.qrels_format));
  const EvalReport report = evaluate_run(run, qrels, k);

  const std::string csv_path = (fs::path(config.output_dir) / "eval_report.csv").string();
  std::ofstream csv(csv_path);
  if (!csv.is_open()) {
    throw_error(ErrorCode::io_error, "cannot write '" + csv_path + "'");
  }
  csv << "# config=" << config_hash() << "\n";
  csv << "query_id,ndcg@" << k << "\n";
  for (const auto& [query_id, value] : report.per_query) {
    csv << query_id << "," << fmt(value) << "\n";
  }
  csv << "mean," << fmt(report.mean_ndcg) << "\n";

  std::ostringstream text;
  text << "mean ndcg@" << k << " = " << fmt(report.mean_ndcg) << " over "
       << report.judged_query_count << " judged queries";
  if (report.unjudged_query_count > 0) {
    text << " (" << report.unjudged_query_count << " without judgments skipped)";
  }
  text << " -> " << csv_path;
  if (per_query) {
    for (const auto& [query_id, value] : report.per_query) {
      text << "\n  " << query_id << " " << fmt(value);
    }
  }
  return text.str();
}

namespace {

SweepInputs load_sweep_inputs(const PipelineConfig& config) {
  if (config.cache_path.empty() || !fs::exists(config.cache_path)) {
    throw_error(ErrorCode::missing_confidence_cache,
                "confidence cache '" + config.cache_path + "' not found; run rerank first");
  }
  SweepInputs inputs;
  inputs.run = load_run(config.input_run);
  inputs.qrels = qrels_to_table(load_qrels(config.qrels_path, config.qrels_format));
  inputs.base_config = config.lcr;
  inputs.ndcg_k = config.eval_k;

  CacheStore cache(config.cache_path);
  for (const auto& [_, payload] : cache.scan_role("confidence")) {
    const ConfidenceRecord record = confidence_record_from_json(payload);
    if (record.k() != config.lcr.k_samples ||
        record.answers.temperature != config.lcr.temperature) {
      continue;  // cached under different sampling settings
    }
    const Confidence conf = Confidence::exact_ratio(record.max_cluster_size(), record.k());
    if (record.doc_id.has_value()) {
      inputs.doc_confidence.insert_or_assign({record.query_id, *record.doc_id}, conf);
    } else {
      inputs.query_confidence.insert_or_assign(record.query_id, conf);
    }
  }
  return inputs;
}

}  // namespace

std::string Pipeline::cmd_sweep(const std::string& mode) {
  const PipelineConfig config = materialize();
  require_file(config.input_run, "input run file");
  require_file(config.qrels_path, "qrels file");
  ensure_output_dir(config);
  const SweepInputs inputs = load_sweep_inputs(config);

  std::ostringstream text;
  if (mode == "doc") {
    const auto cells = sweep_document_thresholds(inputs, tenth_grid(1, 9), tenth_grid(2, 10),
                                                 config.sweep_fixed_qt);
    const std::string csv_path = (fs::path(config.output_dir) / "sweep_doc.csv").string();
    std::ofstream csv(csv_path);
    if (!csv.is_open()) {
      throw_error(ErrorCode::io_error, "cannot write '" + csv_path + "'");
    }
    csv << "# config=" << config_hash() << "\n";
    csv << "t_lower,t_upper,ndcg_delta_percent\n";
    const SweepCell* best = nullptr;
    for (const auto& cell : cells) {
      csv << fmt(cell.t_lower, 1) << "," << fmt(cell.t_upper, 1) << ","
          << fmt(cell.ndcg_delta_percent) << "\n";
      if (best == nullptr || cell.ndcg_delta_percent > best->ndcg_delta_percent) {
        best = &cell;
      }
    }
    text << "swept " << cells.size() << " (LT, UT) cells -> " << csv_path;
    if (best != nullptr) {
      text << "\nbest delta " << fmt(best->ndcg_delta_percent) << "% at LT="
           << fmt(best->t_lower, 1) << ", UT=" << fmt(best->t_upper, 1);
    }
  } else if (mode == "qt") {
    const auto curve = sweep_query_threshold(inputs, tenth_grid(0, 10));
    const std::string csv_path = (fs::path(config.output_dir) / "sweep_qt.csv").string();
    std::ofstream csv(csv_path);
    if (!csv.is_open()) {
      throw_error(ErrorCode::io_error, "cannot write '" + csv_path + "'");
    }
    csv << "# config=" << config_hash() << "\n";
    csv << "t_query,mean_ndcg\n";
    for (const auto& [qt, mean] : curve) {
      csv << fmt(qt, 1) << "," << fmt(mean) << "\n";
    }
    text << "swept " << curve.size() << " query-threshold values -> " << csv_path;
    text << "\nbaseline (qt=0.0) mean ndcg@" << inputs.ndcg_k << " = " << fmt(curve.front().second);
  } else {
    throw_error(ErrorCode::invalid_config, "sweep mode must be 'qt' or 'doc', got '" + mode + "'");
  }
  return text.str();
}

std::string Pipeline::cmd_calibrate(const std::string& confidences_path,
                                    const std::string& qrels_path) {
  const PipelineConfig config = materialize();
  const std::string conf_file = confidences_path.empty() ? config.cache_path : confidences_path;
  const std::string qrels_file = qrels_path.empty() ? config.qrels_path : qrels_path;
  if (conf_file.empty() || !fs::exists(conf_file)) {
    throw_error(ErrorCode::missing_confidence_cache,
                "confidence export '" + conf_file + "' not found");
  }
  require_file(qrels_file, "qrels file");
  ensure_output_dir(config);

  const QrelsTable qrels = qrels_to_table(load_qrels(qrels_file, config.qrels_format));
  CacheStore cache(conf_file);

  std::vector<std::pair<double, int>> records;
  for (const auto& [_, payload] : cache.scan_role("confidence")) {
    const ConfidenceRecord record = confidence_record_from_json(payload);
    if (!record.doc_id.has_value()) {
      continue;  // query-only probes do not pair with a document grade
    }
    auto judged = qrels.find(record.query_id);
    if (judged == qrels.end()) {
      continue;
    }
    auto grade_it = judged->second.find(*record.doc_id);
    const int grade = grade_it == judged->second.end() ? 0 : grade_it->second;
    records.emplace_back(record.mscp_value, binarize(grade));
  }
  if (records.empty()) {
    throw_error(ErrorCode::missing_confidence_cache,
                "no document confidence records overlap the qrels");
  }

  const auto bins = calibration_curve(records);
  const std::string csv_path = (fs::path(config.output_dir) / "calibration.csv").string();
  std::ofstream csv(csv_path);
  if (!csv.is_open()) {
    throw_error(ErrorCode::io_error, "cannot write '" + csv_path + "'");
  }
  csv << "# config=" << config_hash() << "\n";
  csv << "bin,lo,hi,relevant_proportion,sample_count\n";
  for (const auto& bin : bins) {
    csv << bin.index << "," << fmt(bin.lo, 1) << "," << fmt(bin.hi, 1) << ","
        << fmt(bin.relevant_proportion) << "," << bin.sample_count << "\n";
  }

  std::ostringstream text;
  text << "calibrated " << records.size() << " (query, doc) confidence records into 10 bins -> "
       << csv_path;
  return text.str();
}

}  // namespace lcr
