// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lcr/backend.hpp"
#include "lcr/types.hpp"

namespace lcr {

/// Directed entailment judgment: does `premise` semantically entail `hypothesis`?
using EntailmentFn =
    std::function<EntailmentLabel(const std::string& premise, const std::string& hypothesis)>;

/// True iff entailment holds in both directions. Identical strings short-circuit
/// to true without consulting the oracle; a failed forward check skips the
/// backward call since the conjunction is already false.
bool bidirectional_entails(const EntailmentFn& entails, const std::string& a,
                           const std::string& b);
bool bidirectional_entails(LlmService& service, const Query& query, const std::string& a,
                           const std::string& b);

/// Greedy semantic clustering: answers are processed in index order; each one
/// joins the first existing cluster whose representative (the cluster's first
/// member) it mutually entails, or opens a new cluster. Issues at most 2*k*M
/// entailment checks for M resulting clusters.
SemanticPartition cluster_semantic(const EntailmentFn& entails,
                                   const std::vector<std::string>& answers);
SemanticPartition cluster_semantic(LlmService& service, const Query& query,
                                   const std::vector<std::string>& answers);

/// Which answer speaks for a cluster during the greedy scan.
struct ClusterRep {
  int cluster_index = 0;
  int representative = 0;  // answer index of the first member added
};

std::vector<ClusterRep> cluster_representatives(const SemanticPartition& partition);

/// Maximum semantic cluster proportion: size of the largest cluster over k.
double mscp(const SemanticPartition& partition);

/// Shannon entropy (natural log) over cluster proportions.
double semantic_entropy(const SemanticPartition& partition);

/// Everything computed for one (query, optional document) confidence probe.
struct ConfidenceRecord {
  std::string query_id;
  std::optional<std::string> doc_id;
  SampleBatch answers;
  SemanticPartition partition;
  double mscp_value = 0.0;
  double sem_entropy = 0.0;

  /// Numerator of the exact confidence rational; the denominator is k.
  int max_cluster_size() const { return partition.max_cluster_size(); }
  int k() const { return partition.k(); }
};

nlohmann::json confidence_record_to_json(const ConfidenceRecord& record);
ConfidenceRecord confidence_record_from_json(const nlohmann::json& j);

/// Samples k answers for the query (with the document as context when given),
/// clusters them and derives MSCP and semantic entropy. Results are cached by
/// (backend, query_id, doc_id, k, temperature); hits cost no backend calls.
ConfidenceRecord confidence_of(LlmService& service, const Query& query,
                               const Document* document, const LcrConfig& config);

}  // namespace lcr
