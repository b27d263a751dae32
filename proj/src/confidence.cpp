// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include "lcr/confidence.hpp"

#include <cmath>

#include <json.hpp>

#include "sha256.hpp"

namespace lcr {

using nlohmann::json;

bool bidirectional_entails(const EntailmentFn& entails, const std::string& a,
                           const std::string& b) {
  if (a == b) {
    return true;
  }
  if (entails(a, b) != EntailmentLabel::entailment) {
    return false;
  }
  return entails(b, a) == EntailmentLabel::entailment;
}

bool bidirectional_entails(LlmService& service, const Query& query, const std::string& a,
                           const std::string& b) {
  EntailmentFn fn = [&](const std::string& premise, const std::string& hypothesis) {
    return service.classify_entailment(query, premise, hypothesis);
  };
  return bidirectional_entails(fn, a, b);
}

SemanticPartition cluster_semantic(const EntailmentFn& entails,
                                   const std::vector<std::string>& answers) {
  if (answers.empty()) {
    throw_error(ErrorCode::empty_input, "cannot cluster an empty answer list");
  }
  std::vector<std::vector<int>> clusters;
  std::vector<int> representatives;  // first member of each cluster
  for (int i = 0; i < static_cast<int>(answers.size()); ++i) {
    bool joined = false;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const std::string& rep = answers[static_cast<std::size_t>(representatives[c])];
      if (bidirectional_entails(entails, answers[static_cast<std::size_t>(i)], rep)) {
        clusters[c].push_back(i);
        joined = true;
        break;
      }
    }
    if (!joined) {
      clusters.push_back({i});
      representatives.push_back(i);
    }
  }
  return SemanticPartition(std::move(clusters), static_cast<int>(answers.size()));
}

SemanticPartition cluster_semantic(LlmService& service, const Query& query,
                                   const std::vector<std::string>& answers) {
  EntailmentFn fn = [&](const std::string& premise, const std::string& hypothesis) {
    return service.classify_entailment(query, premise, hypothesis);
  };
  return cluster_semantic(fn, answers);
}

std::vector<ClusterRep> cluster_representatives(const SemanticPartition& partition) {
  std::vector<ClusterRep> reps;
  reps.reserve(partition.clusters().size());
  for (std::size_t c = 0; c < partition.clusters().size(); ++c) {
    reps.push_back(ClusterRep{static_cast<int>(c), partition.clusters()[c].front()});
  }
  return reps;
}

double mscp(const SemanticPartition& partition) {
  return static_cast<double>(partition.max_cluster_size()) / static_cast<double>(partition.k());
}

double semantic_entropy(const SemanticPartition& partition) {
  const double k = static_cast<double>(partition.k());
  double sum = 0.0;
  for (const auto& cluster : partition.clusters()) {
    const double p = static_cast<double>(cluster.size()) / k;
    sum += p * std::log(p);
  }
  return sum == 0.0 ? 0.0 : -sum;
}

json confidence_record_to_json(const ConfidenceRecord& record) {
  json doc = record.doc_id.has_value() ? json(*record.doc_id) : json(nullptr);
  return json{{"query_id", record.query_id},
              {"doc_id", doc},
              {"prompt", record.answers.prompt},
              {"temperature", record.answers.temperature},
              {"answers", record.answers.answers},
              {"clusters", record.partition.clusters()},
              {"k", record.partition.k()},
              {"mscp", record.mscp_value},
              {"sem_entropy", record.sem_entropy}};
}

ConfidenceRecord confidence_record_from_json(const json& j) {
  SampleBatch batch{j.at("prompt").get<std::string>(), j.at("temperature").get<double>(),
                    j.at("answers").get<std::vector<std::string>>()};
  SemanticPartition partition(j.at("clusters").get<std::vector<std::vector<int>>>(),
                              j.at("k").get<int>());
  std::optional<std::string> doc_id;
  if (!j.at("doc_id").is_null()) {
    doc_id = j.at("doc_id").get<std::string>();
  }
  return ConfidenceRecord{j.at("query_id").get<std::string>(),
                          std::move(doc_id),
                          std::move(batch),
                          std::move(partition),
                          j.at("mscp").get<double>(),
                          j.at("sem_entropy").get<double>()};
}

ConfidenceRecord confidence_of(LlmService& service, const Query& query, const Document* document,
                               const LcrConfig& config) {
  config.validate();

  json key_fields = json::array({query.query_id,
                                 document != nullptr ? json(document->doc_id) : json(nullptr),
                                 config.k_samples, config.temperature});
  const std::string key =
      cache_key(service.backend().id().name, "confidence", sha256_hex(key_fields.dump()));
  if (service.cache() != nullptr) {
    if (auto hit = service.cache()->get(key)) {
      return confidence_record_from_json(*hit);
    }
  }

  const std::string prompt = build_answer_prompt(query, document);
  SampleBatch batch = service.sample_answers(prompt, config.k_samples, config.temperature);
  SemanticPartition partition = cluster_semantic(service, query, batch.answers);
  ConfidenceRecord record{query.query_id,
                          document != nullptr ? std::optional<std::string>(document->doc_id)
                                              : std::nullopt,
                          std::move(batch),
                          std::move(partition),
                          0.0,
                          0.0};
  record.mscp_value = mscp(record.partition);
  record.sem_entropy = semantic_entropy(record.partition);

  if (service.cache() != nullptr) {
    service.cache()->put(key, "confidence", confidence_record_to_json(record));
  }
  return record;
}

}  // namespace lcr
