// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include "lcr/types.hpp"

#include <cmath>
#include <unordered_set>

#include <json.hpp>

namespace lcr {

ScoredList validate_scored_list(ScoredList list) {
  std::unordered_set<std::string> seen;
  seen.reserve(list.entries.size());
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    const ScoredEntry& entry = list.entries[i];
    if (!seen.insert(entry.doc_id).second) {
      throw_error(ErrorCode::duplicate_doc,
                  "doc '" + entry.doc_id + "' appears more than once in list for query '" +
                      list.query_id + "'");
    }
    if (!std::isfinite(entry.prev_score)) {
      throw_error(ErrorCode::non_finite_score,
                  "doc '" + entry.doc_id + "' carries a non-finite prev_score");
    }
    if (entry.original_rank != static_cast<int>(i) + 1) {
      throw_error(ErrorCode::rank_gap,
                  "expected rank " + std::to_string(i + 1) + " at position " +
                      std::to_string(i + 1) + ", found " + std::to_string(entry.original_rank));
    }
  }
  return list;
}

void LcrConfig::validate() const {
  if (!(t_lower < t_upper)) {
    throw_error(ErrorCode::invalid_thresholds,
                "t_lower (" + std::to_string(t_lower) + ") must be strictly below t_upper (" +
                    std::to_string(t_upper) + ")");
  }
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(t_query) || !in_unit(t_upper) || !in_unit(t_lower)) {
    throw_error(ErrorCode::invalid_config, "thresholds must lie in [0, 1]");
  }
  if (k_samples < 1) {
    throw_error(ErrorCode::invalid_config, "k_samples must be >= 1");
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw_error(ErrorCode::invalid_config, "temperature must be > 0");
  }
}

SemanticPartition::SemanticPartition(std::vector<std::vector<int>> clusters, int k)
    : clusters_(std::move(clusters)), k_(k) {
  if (k_ < 1) {
    throw_error(ErrorCode::invalid_config, "partition requires k >= 1");
  }
  std::vector<bool> covered(static_cast<std::size_t>(k_), false);
  int total = 0;
  for (const auto& cluster : clusters_) {
    if (cluster.empty()) {
      throw_error(ErrorCode::invalid_config, "partition contains an empty cluster");
    }
    for (int index : cluster) {
      if (index < 0 || index >= k_) {
        throw_error(ErrorCode::invalid_config,
                    "answer index " + std::to_string(index) + " outside 0.." + std::to_string(k_ - 1));
      }
      if (covered[static_cast<std::size_t>(index)]) {
        throw_error(ErrorCode::invalid_config,
                    "answer index " + std::to_string(index) + " assigned to two clusters");
      }
      covered[static_cast<std::size_t>(index)] = true;
      ++total;
    }
  }
  if (total != k_) {
    throw_error(ErrorCode::invalid_config,
                "cluster sizes sum to " + std::to_string(total) + ", expected " + std::to_string(k_));
  }
}

std::vector<int> SemanticPartition::cluster_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(clusters_.size());
  for (const auto& cluster : clusters_) {
    sizes.push_back(static_cast<int>(cluster.size()));
  }
  return sizes;
}

int SemanticPartition::max_cluster_size() const {
  int best = 0;
  for (const auto& cluster : clusters_) {
    best = std::max(best, static_cast<int>(cluster.size()));
  }
  return best;
}

QrelsTable qrels_to_table(const std::vector<RelevanceJudgment>& judgments) {
  QrelsTable table;
  for (const auto& j : judgments) {
    table[j.query_id][j.doc_id] = j.grade;
  }
  return table;
}

void to_json(nlohmann::json& j, const ScoredEntry& e) {
  j = nlohmann::json{{"doc_id", e.doc_id}, {"prev_score", e.prev_score}, {"rank", e.original_rank}};
}

void from_json(const nlohmann::json& j, ScoredEntry& e) {
  j.at("doc_id").get_to(e.doc_id);
  j.at("prev_score").get_to(e.prev_score);
  j.at("rank").get_to(e.original_rank);
}

void to_json(nlohmann::json& j, const ScoredList& list) {
  j = nlohmann::json{{"query_id", list.query_id}, {"entries", list.entries}};
}

void from_json(const nlohmann::json& j, ScoredList& list) {
  j.at("query_id").get_to(list.query_id);
  j.at("entries").get_to(list.entries);
}

}  // namespace lcr
