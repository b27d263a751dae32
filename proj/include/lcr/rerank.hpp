// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lcr/confidence.hpp"
#include "lcr/types.hpp"

namespace lcr {

enum class Bin : int { low = -1, medium = 0, high = 1 };

inline int bin_value(Bin bin) { return static_cast<int>(bin); }

/// Confidence score carried both as a double and, when it came from a cluster
/// partition, as the exact rational num/den. Exact values make bin-boundary
/// comparisons immune to floating-point rounding.
struct Confidence {
  double value = 0.0;
  long long num = 0;
  long long den = 0;  // > 0 when the rational form is known

  bool exact() const { return den > 0; }

  static Confidence exact_ratio(long long num, long long den);
  static Confidence from_value(double v) { return Confidence{v, 0, 0}; }
};

/// Threshold that remembers its exact value in ten-thousandths when the
/// double has at most four decimal places (the usual grid case).
struct Threshold {
  double value = 0.0;
  std::optional<long long> scaled_1e4;

  static Threshold of(double v);
};

bool confidence_at_least(const Confidence& c, const Threshold& t);  // c >= t
bool confidence_at_most(const Confidence& c, const Threshold& t);   // c <= t

/// High (+1) when c >= t_upper, low (-1) when c <= t_lower, medium otherwise.
/// Both boundaries are inclusive toward the outer bins.
Bin binned_confidence_score(const Confidence& c, const Threshold& t_upper,
                            const Threshold& t_lower);
Bin binned_confidence_score(double c, double t_upper, double t_lower);

struct RerankEntry {
  std::string doc_id;
  std::optional<Bin> bin;            // unset when the query gate fired
  std::optional<double> confidence;  // unset when the query gate fired
  double prev_score = 0.0;
  int new_rank = 0;
};

struct RerankOutcome {
  std::string query_id;
  bool gated = false;  // true when the original (prev-score) ranking was kept
  std::optional<double> query_confidence;
  std::vector<RerankEntry> entries;
};

nlohmann::json rerank_outcome_to_json(const RerankOutcome& outcome);

/// One candidate as seen by the sorter.
struct DocConfidence {
  std::string doc_id;
  Confidence conf;
  double prev_score = 0.0;
};

/// The binned multi-level sort. When the query gate is enabled and the query
/// confidence clears t_query, the original prev-score-descending order is
/// kept. Otherwise entries are stably sorted by (bin desc, prev_score desc);
/// ties preserve input order in both branches.
RerankOutcome lcr_sort(const Confidence& query_conf, const std::vector<DocConfidence>& entries,
                       const LcrConfig& config, const std::string& query_id = "");

/// End-to-end reranking of one retrieved list: computes the query confidence
/// (skipped when the gate is disabled, which forces the low-confidence
/// branch), then per-document confidences unless gated, then sorts. Document
/// confidence probes fan out over up to `parallelism` threads and are joined
/// in input order.
RerankOutcome rerank_query(LlmService& service, const Query& query,
                           const ScoredList& scored_list, const CorpusMap& corpus,
                           const LcrConfig& config, int parallelism = 1);

}  // namespace lcr
