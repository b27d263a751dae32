// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include "lcr/lcr.h"

#include <exception>
#include <new>
#include <string>

#include "lcr/confidence.hpp"
#include "lcr/pipeline.hpp"
#include "lcr/rerank.hpp"
#include "lcr/types.hpp"

namespace {

thread_local std::string g_last_error;

lcr_status status_for(lcr::ErrorCode code) {
  using lcr::ErrorCode;
  switch (code) {
    case ErrorCode::missing_document:
    case ErrorCode::missing_query:
    case ErrorCode::missing_confidence_cache:
    case ErrorCode::empty_intersection:
      return LCR_ERROR_NOT_FOUND;
    case ErrorCode::malformed_run_line:
    case ErrorCode::non_contiguous_ranks:
    case ErrorCode::malformed_record:
    case ErrorCode::corrupt_record:
      return LCR_ERROR_PARSE;
    case ErrorCode::io_error:
      return LCR_ERROR_IO;
    case ErrorCode::remote_error:
    case ErrorCode::script_miss:
      return LCR_ERROR_BACKEND;
    case ErrorCode::already_exists:
      return LCR_ERROR_STATE;
    default:
      return LCR_ERROR_INVALID_ARGUMENT;
  }
}

/// Runs `fn` inside the C boundary, translating exceptions to status codes.
template <typename Fn>
lcr_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LCR_OK;
  } catch (const lcr::Error& error) {
    g_last_error = error.what();
    return status_for(error.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LCR_ERROR_INTERNAL;
  } catch (const std::exception& error) {
    g_last_error = error.what();
    return LCR_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return LCR_ERROR_INTERNAL;
  }
}

std::string arg_or_empty(const char* text) { return text == nullptr ? std::string() : text; }

}  // namespace

struct lcr_pipeline {
  explicit lcr_pipeline(const char* config_path) : impl(arg_or_empty(config_path)) {}
  lcr::Pipeline impl;
  std::string report;
};

extern "C" {

const char* lcr_version(void) { return "1.0.0"; }

const char* lcr_last_error(void) { return g_last_error.c_str(); }

lcr_status lcr_pipeline_open(const char* config_path, lcr_pipeline** out) {
  return guarded([&] {
    if (config_path == nullptr || out == nullptr) {
      lcr::throw_error(lcr::ErrorCode::invalid_config, "config_path and out must be non-NULL");
    }
    *out = new lcr_pipeline(config_path);
  });
}

void lcr_pipeline_close(lcr_pipeline* pipeline) { delete pipeline; }

lcr_status lcr_pipeline_set_option(lcr_pipeline* pipeline, const char* key, const char* value) {
  return guarded([&] {
    if (pipeline == nullptr || key == nullptr || value == nullptr) {
      lcr::throw_error(lcr::ErrorCode::invalid_config, "pipeline, key and value must be non-NULL");
    }
    pipeline->impl.set_option(key, value);
  });
}

lcr_status lcr_pipeline_index(lcr_pipeline* pipeline, int force) {
  return guarded([&] {
    if (pipeline == nullptr) {
      lcr::throw_error(lcr::ErrorCode::invalid_config, "pipeline must be non-NULL");
    }
    pipeline->report = pipeline->impl.cmd_index(force != 0);
  });
}

lcr_status lcr_pipeline_retrieve(lcr_pipeline* pipeline, int k) {
  return guarded([&] {
    if (pipeline == nullptr) {
      lcr::throw_error(lcr::ErrorCode::invalid_config, "pipeline must be non-NULL");
    }
    pipeline->report = pipeline->impl.cmd_retrieve(k);
  });
}

lcr_status lcr_pipeline_rerank(lcr_pipeline* pipeline, const char* input_run_path, int fail_fast) {
  return guarded([&] {
    if (pipeline == nullptr) {
      lcr::throw_error(lcr::ErrorCode::invalid_config, "pipeline must be non-NULL");
    }
    pipeline->report = pipeline->impl.cmd_rerank(arg_or_empty(input_run_path), fail_fast != 0);
  });
}

lcr_status lcr_pipeline_eval(lcr_pipeline* pipeline, const char* run_path, const char* qrels_path,
                             int k, int per_query) {
  return guarded([&] {
    if (pipeline == nullptr) {
      lcr::throw_error(lcr::ErrorCode::invalid_config, "pipeline must be non-NULL");
    }
    pipeline->report =
        pipeline->impl.cmd_eval(arg_or_empty(run_path), arg_or_empty(qrels_path), k, per_query != 0);
  });
}

lcr_status lcr_pipeline_sweep(lcr_pipeline* pipeline, const char* mode) {
  return guarded([&] {
    if (pipeline == nullptr || mode == nullptr) {
      lcr::throw_error(lcr::ErrorCode::invalid_config, "pipeline and mode must be non-NULL");
    }
    pipeline->report = pipeline->impl.cmd_sweep(mode);
  });
}

lcr_status lcr_pipeline_calibrate(lcr_pipeline* pipeline, const char* confidences_path,
                                  const char* qrels_path) {
  return guarded([&] {
    if (pipeline == nullptr) {
      lcr::throw_error(lcr::ErrorCode::invalid_config, "pipeline must be non-NULL");
    }
    pipeline->report =
        pipeline->impl.cmd_calibrate(arg_or_empty(confidences_path), arg_or_empty(qrels_path));
  });
}

const char* lcr_pipeline_report(const lcr_pipeline* pipeline) {
  return pipeline == nullptr ? "" : pipeline->report.c_str();
}

int lcr_pipeline_failed_queries(const lcr_pipeline* pipeline) {
  return pipeline == nullptr ? 0 : pipeline->impl.failed_query_count();
}

lcr_status lcr_mscp(const int* cluster_sizes, int num_clusters, double* out) {
  return guarded([&] {
    if (cluster_sizes == nullptr || out == nullptr || num_clusters < 1) {
      lcr::throw_error(lcr::ErrorCode::empty_input, "need at least one cluster size");
    }
    std::vector<std::vector<int>> clusters;
    int next = 0;
    for (int c = 0; c < num_clusters; ++c) {
      std::vector<int> members;
      for (int i = 0; i < cluster_sizes[c]; ++i) {
        members.push_back(next++);
      }
      clusters.push_back(std::move(members));
    }
    const lcr::SemanticPartition partition(std::move(clusters), next);
    *out = lcr::mscp(partition);
  });
}

lcr_status lcr_semantic_entropy(const int* cluster_sizes, int num_clusters, double* out) {
  return guarded([&] {
    if (cluster_sizes == nullptr || out == nullptr || num_clusters < 1) {
      lcr::throw_error(lcr::ErrorCode::empty_input, "need at least one cluster size");
    }
    std::vector<std::vector<int>> clusters;
    int next = 0;
    for (int c = 0; c < num_clusters; ++c) {
      std::vector<int> members;
      for (int i = 0; i < cluster_sizes[c]; ++i) {
        members.push_back(next++);
      }
      clusters.push_back(std::move(members));
    }
    const lcr::SemanticPartition partition(std::move(clusters), next);
    *out = lcr::semantic_entropy(partition);
  });
}

lcr_status lcr_binned_confidence_score(double confidence, double t_upper, double t_lower,
                                       int* out_bin) {
  return guarded([&] {
    if (out_bin == nullptr) {
      lcr::throw_error(lcr::ErrorCode::invalid_config, "out_bin must be non-NULL");
    }
    *out_bin = lcr::bin_value(lcr::binned_confidence_score(confidence, t_upper, t_lower));
  });
}

lcr_status lcr_sort(double query_confidence, const double* confidences,
                    const double* prev_scores, int n, const lcr_sort_params* params,
                    int* out_order, int* out_gated) {
  return guarded([&] {
    if (confidences == nullptr || prev_scores == nullptr || params == nullptr ||
        out_order == nullptr || n < 1) {
      lcr::throw_error(lcr::ErrorCode::empty_input, "lcr_sort requires n >= 1 and non-NULL arrays");
    }
    lcr::LcrConfig config;
    config.t_query = params->t_query;
    config.t_upper = params->t_upper;
    config.t_lower = params->t_lower;
    config.query_threshold_enabled = params->query_threshold_enabled != 0;

    std::vector<lcr::DocConfidence> entries;
    entries.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      entries.push_back(lcr::DocConfidence{std::to_string(i),
                                           lcr::Confidence::from_value(confidences[i]),
                                           prev_scores[i]});
    }
    const lcr::RerankOutcome outcome =
        lcr::lcr_sort(lcr::Confidence::from_value(query_confidence), entries, config);
    for (int rank = 0; rank < n; ++rank) {
      out_order[rank] = std::stoi(outcome.entries[static_cast<std::size_t>(rank)].doc_id);
    }
    if (out_gated != nullptr) {
      *out_gated = outcome.gated ? 1 : 0;
    }
  });
}

}  // extern "C"
