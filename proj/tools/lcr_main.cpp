// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver for the LCR toolkit. Parses arguments, forwards them to
// the shared library through the C interface, and prints the report.

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lcr/lcr.h"

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value pairs
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "pipeline configuration JSON file")
      ->required();
  cmd->add_option("--set", args.overrides,
                  "config override as dotted.key=value (repeatable; flags win over the file)");
}

int apply_overrides(lcr_pipeline* pipeline, const std::vector<std::string>& overrides) {
  for (const std::string& entry : overrides) {
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "lcr: error: override '%s' is not of the form key=value\n",
                   entry.c_str());
      return LCR_ERROR_INVALID_ARGUMENT;
    }
    const std::string key = entry.substr(0, eq);
    const std::string value = entry.substr(eq + 1);
    if (lcr_status status = lcr_pipeline_set_option(pipeline, key.c_str(), value.c_str());
        status != LCR_OK) {
      std::fprintf(stderr, "lcr: error: %s\n", lcr_last_error());
      return status;
    }
  }
  return LCR_OK;
}

int run_command(const CommonArgs& args, const std::function<lcr_status(lcr_pipeline*)>& command) {
  lcr_pipeline* pipeline = nullptr;
  if (lcr_status status = lcr_pipeline_open(args.config_path.c_str(), &pipeline);
      status != LCR_OK) {
    std::fprintf(stderr, "lcr: error: %s\n", lcr_last_error());
    return status;
  }
  int exit_code = apply_overrides(pipeline, args.overrides);
  if (exit_code == LCR_OK) {
    const lcr_status status = command(pipeline);
    if (status != LCR_OK) {
      std::fprintf(stderr, "lcr: error: %s\n", lcr_last_error());
      exit_code = status;
    } else {
      std::printf("%s\n", lcr_pipeline_report(pipeline));
      exit_code = lcr_pipeline_failed_queries(pipeline) == 0 ? 0 : 1;
    }
  }
  lcr_pipeline_close(pipeline);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LCR: confidence-based reranking for retrieval-augmented generation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lcr_version()));

  CommonArgs index_args;
  bool force = false;
  CLI::App* index = app.add_subcommand("index", "build the BM25 inverted index");
  add_common(index, index_args);
  index->add_flag("--force", force, "rebuild even if the index file exists");

  CommonArgs retrieve_args;
  int retrieve_k = 0;
  CLI::App* retrieve = app.add_subcommand("retrieve", "run BM25 top-k retrieval");
  add_common(retrieve, retrieve_args);
  retrieve->add_option("--k", retrieve_k, "candidates per query (default: config retrieve_k)");

  CommonArgs rerank_args;
  std::string rerank_run;
  bool fail_fast = false;
  CLI::App* rerank = app.add_subcommand("rerank", "rerank a run with LLM confidence bins");
  add_common(rerank, rerank_args);
  rerank->add_option("--run", rerank_run, "input run file (default: config input_run)");
  rerank->add_flag("--fail-fast", fail_fast, "abort on the first failing query");

  CommonArgs eval_args;
  std::string eval_run, eval_qrels;
  int eval_k = 0;
  bool per_query = false;
  CLI::App* eval = app.add_subcommand("eval", "score a run with ndcg@k");
  add_common(eval, eval_args);
  eval->add_option("--run", eval_run, "run file to score (default: the reranked run)");
  eval->add_option("--qrels", eval_qrels, "qrels file (default: config dataset.qrels)");
  eval->add_option("--k", eval_k, "ndcg cutoff (default: config eval_k)");
  eval->add_flag("--per-query", per_query, "also print one row per query");

  CommonArgs sweep_args;
  std::string sweep_mode;
  CLI::App* sweep = app.add_subcommand("sweep", "threshold sweeps from cached confidences");
  add_common(sweep, sweep_args);
  sweep->add_option("mode", sweep_mode, "'qt' (query threshold) or 'doc' (LT/UT grid)")
      ->required()
      ->check(CLI::IsMember({"qt", "doc"}));

  CommonArgs cal_args;
  std::string cal_confidences, cal_qrels;
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "confidence-relevance curve over 10 bins");
  add_common(calibrate, cal_args);
  calibrate->add_option("--confidences", cal_confidences,
                        "confidence export / cache file (default: config cache)");
  calibrate->add_option("--qrels", cal_qrels, "qrels file (default: config dataset.qrels)");

  CLI11_PARSE(app, argc, argv);

  if (index->parsed()) {
    return run_command(index_args,
                       [&](lcr_pipeline* p) { return lcr_pipeline_index(p, force ? 1 : 0); });
  }
  if (retrieve->parsed()) {
    return run_command(retrieve_args,
                       [&](lcr_pipeline* p) { return lcr_pipeline_retrieve(p, retrieve_k); });
  }
  if (rerank->parsed()) {
    return run_command(rerank_args, [&](lcr_pipeline* p) {
      return lcr_pipeline_rerank(p, rerank_run.c_str(), fail_fast ? 1 : 0);
    });
  }
  if (eval->parsed()) {
    return run_command(eval_args, [&](lcr_pipeline* p) {
      return lcr_pipeline_eval(p, eval_run.c_str(), eval_qrels.c_str(), eval_k, per_query ? 1 : 0);
    });
  }
  if (sweep->parsed()) {
    return run_command(sweep_args,
                       [&](lcr_pipeline* p) { return lcr_pipeline_sweep(p, sweep_mode.c_str()); });
  }
  if (calibrate->parsed()) {
    return run_command(cal_args, [&](lcr_pipeline* p) {
      return lcr_pipeline_calibrate(p, cal_confidences.c_str(), cal_qrels.c_str());
    });
  }
  return 0;
}
