// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcr/error.hpp"

namespace lcr {

struct Document {
  std::string doc_id;
  std::string title;  // may be empty
  std::string text;
};

struct Query {
  std::string query_id;
  std::string text;
};

struct RelevanceJudgment {
  std::string query_id;
  std::string doc_id;
  int grade = 0;
};

/// One candidate in a ranked list, carrying the prior score it arrived with.
struct ScoredEntry {
  std::string doc_id;
  double prev_score = 0.0;
  int original_rank = 0;  // 1-based position in the input ranking
};

struct ScoredList {
  std::string query_id;
  std::vector<ScoredEntry> entries;  // sorted by original_rank ascending
};

/// Checks doc-id uniqueness, score finiteness and that original_rank values
/// form 1..n. Returns the list unchanged when all invariants hold.
ScoredList validate_scored_list(ScoredList list);

/// Thresholds and sampling parameters for the confidence reranker.
struct LcrConfig {
  double t_query = 0.5;
  double t_upper = 0.9;
  double t_lower = 0.4;
  int k_samples = 10;
  double temperature = 1.0;
  bool query_threshold_enabled = true;

  void validate() const;
};

/// Partition of k sampled answers (by index 0..k-1) into semantic clusters.
/// Construction enforces that clusters are nonempty, pairwise disjoint and
/// cover exactly {0..k-1}.
class SemanticPartition {
 public:
  SemanticPartition(std::vector<std::vector<int>> clusters, int k);

  const std::vector<std::vector<int>>& clusters() const { return clusters_; }
  int k() const { return k_; }
  int cluster_count() const { return static_cast<int>(clusters_.size()); }
  std::vector<int> cluster_sizes() const;
  int max_cluster_size() const;

 private:
  std::vector<std::vector<int>> clusters_;
  int k_;
};

using CorpusMap = std::map<std::string, Document>;
using QueryMap = std::map<std::string, Query>;
/// query_id -> doc_id -> grade
using QrelsTable = std::map<std::string, std::map<std::string, int>>;

QrelsTable qrels_to_table(const std::vector<RelevanceJudgment>& judgments);

void to_json(nlohmann::json& j, const ScoredEntry& e);
void from_json(const nlohmann::json& j, ScoredEntry& e);
void to_json(nlohmann::json& j, const ScoredList& list);
void from_json(const nlohmann::json& j, ScoredList& list);

}  // namespace lcr
