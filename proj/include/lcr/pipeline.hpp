// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lcr/backend.hpp"
#include "lcr/data.hpp"
#include "lcr/retrieval.hpp"
#include "lcr/types.hpp"

namespace lcr {

struct BackendSettings {
  BackendKind kind = BackendKind::scripted;
  std::string model;
  std::string endpoint;
  std::string api_key;
  std::string api_key_env = "LCR_API_KEY";
  int in_flight_limit = 8;
  std::string fixtures_path;
};

/// Everything a pipeline run needs, materialized from one JSON config file.
/// Relative paths are resolved against the config file's directory.
struct PipelineConfig {
  std::string corpus_path;
  std::string queries_path;
  std::string qrels_path;
  QrelsFormat qrels_format = QrelsFormat::beir_tsv;
  BackendSettings backend;
  LcrConfig lcr;
  Bm25Params bm25;
  int retrieve_k = 10;
  int eval_k = 5;
  std::string output_dir = "out";
  std::string cache_path;
  std::string index_path;
  std::string input_run;
  std::optional<double> sweep_fixed_qt;

  static PipelineConfig from_json(const nlohmann::json& j, const std::string& base_dir);
};

/// Applies LCR_ENDPOINT / LCR_MODEL and the configured api-key variable on
/// top of the file values (environment wins).
BackendSettings resolve_backend_env(BackendSettings settings);

/// Drives the index/retrieve/rerank/eval/sweep/calibrate subcommands over a
/// single JSON configuration. Each command returns a human-readable report
/// and writes its artifacts under the configured output directory with
/// deterministic names, so reruns are byte-identical.
class Pipeline {
 public:
  explicit Pipeline(const std::string& config_path);

  /// Dotted-path config override, e.g. ("lcr.t_query", "0.3"). Values are
  /// parsed as JSON when possible and fall back to strings.
  void set_option(const std::string& dotted_key, const std::string& value);

  std::string cmd_index(bool force);
  std::string cmd_retrieve(int k = 0);
  std::string cmd_rerank(const std::string& input_run_path = "", bool fail_fast = false);
  std::string cmd_eval(const std::string& run_path = "", const std::string& qrels_path = "",
                       int k = 0, bool per_query = false);
  std::string cmd_sweep(const std::string& mode);
  std::string cmd_calibrate(const std::string& confidences_path = "",
                            const std::string& qrels_path = "");

  int failed_query_count() const { return failed_queries_; }
  std::string config_hash() const;
  PipelineConfig materialize() const;

 private:
  std::shared_ptr<LlmBackend> make_backend(const BackendSettings& settings) const;
  void ensure_output_dir(const PipelineConfig& config) const;

  std::string base_dir_;
  nlohmann::json effective_;
  int failed_queries_ = 0;
};

}  // namespace lcr
