// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include "lcr/rerank.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include <json.hpp>

namespace lcr {

Confidence Confidence::exact_ratio(long long num, long long den) {
  if (den <= 0 || num < 0 || num > den) {
    throw_error(ErrorCode::invalid_config,
                "confidence ratio " + std::to_string(num) + "/" + std::to_string(den) +
                    " outside [0, 1]");
  }
  return Confidence{static_cast<double>(num) / static_cast<double>(den), num, den};
}

Threshold Threshold::of(double v) {
  Threshold t{v, std::nullopt};
  if (std::isfinite(v) && v >= 0.0 && v <= 1.0) {
    const long long scaled = std::llround(v * 10000.0);
    if (static_cast<double>(scaled) / 10000.0 == v) {
      t.scaled_1e4 = scaled;
    }
  }
  return t;
}

bool confidence_at_least(const Confidence& c, const Threshold& t) {
  if (c.exact() && t.scaled_1e4.has_value()) {
    return c.num * 10000 >= *t.scaled_1e4 * c.den;
  }
  return c.value >= t.value;
}

bool confidence_at_most(const Confidence& c, const Threshold& t) {
  if (c.exact() && t.scaled_1e4.has_value()) {
    return c.num * 10000 <= *t.scaled_1e4 * c.den;
  }
  return c.value <= t.value;
}

Bin binned_confidence_score(const Confidence& c, const Threshold& t_upper,
                            const Threshold& t_lower) {
  if (!(t_lower.value < t_upper.value)) {
    throw_error(ErrorCode::invalid_thresholds,
                "t_lower must be strictly below t_upper");
  }
  if (confidence_at_least(c, t_upper)) {
    return Bin::high;
  }
  if (confidence_at_most(c, t_lower)) {
    return Bin::low;
  }
  return Bin::medium;
}

Bin binned_confidence_score(double c, double t_upper, double t_lower) {
  return binned_confidence_score(Confidence::from_value(c), Threshold::of(t_upper),
                                 Threshold::of(t_lower));
}

namespace {

std::vector<std::size_t> order_by_prev_score(const std::vector<DocConfidence>& entries) {
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return entries[a].prev_score > entries[b].prev_score;
  });
  return order;
}

}  // namespace

RerankOutcome lcr_sort(const Confidence& query_conf, const std::vector<DocConfidence>& entries,
                       const LcrConfig& config, const std::string& query_id) {
  config.validate();
  if (entries.empty()) {
    throw_error(ErrorCode::empty_input, "lcr_sort requires at least one entry");
  }

  RerankOutcome outcome;
  outcome.query_id = query_id;
  outcome.query_confidence = config.query_threshold_enabled
                                 ? std::optional<double>(query_conf.value)
                                 : std::nullopt;

  const bool gated = config.query_threshold_enabled &&
                     confidence_at_least(query_conf, Threshold::of(config.t_query));
  outcome.gated = gated;

  if (gated) {
    const auto order = order_by_prev_score(entries);
    int rank = 1;
    for (std::size_t index : order) {
      outcome.entries.push_back(RerankEntry{entries[index].doc_id, std::nullopt, std::nullopt,
                                            entries[index].prev_score, rank++});
    }
    return outcome;
  }

  const Threshold upper = Threshold::of(config.t_upper);
  const Threshold lower = Threshold::of(config.t_lower);
  std::vector<Bin> bins;
  bins.reserve(entries.size());
  for (const auto& entry : entries) {
    bins.push_back(binned_confidence_score(entry.conf, upper, lower));
  }

  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (bins[a] != bins[b]) {
      return bin_value(bins[a]) > bin_value(bins[b]);
    }
    return entries[a].prev_score > entries[b].prev_score;
  });

  int rank = 1;
  for (std::size_t index : order) {
    outcome.entries.push_back(RerankEntry{entries[index].doc_id, bins[index],
                                          entries[index].conf.value, entries[index].prev_score,
                                          rank++});
  }
  return outcome;
}

nlohmann::json rerank_outcome_to_json(const RerankOutcome& outcome) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : outcome.entries) {
    entries.push_back(nlohmann::json{
        {"doc_id", e.doc_id},
        {"bin", e.bin.has_value() ? nlohmann::json(bin_value(*e.bin)) : nlohmann::json(nullptr)},
        {"confidence",
         e.confidence.has_value() ? nlohmann::json(*e.confidence) : nlohmann::json(nullptr)},
        {"prev_score", e.prev_score},
        {"new_rank", e.new_rank}});
  }
  return nlohmann::json{{"query_id", outcome.query_id},
                        {"gated", outcome.gated},
                        {"query_confidence", outcome.query_confidence.has_value()
                                                 ? nlohmann::json(*outcome.query_confidence)
                                                 : nlohmann::json(nullptr)},
                        {"entries", std::move(entries)}};
}

RerankOutcome rerank_query(LlmService& service, const Query& query, const ScoredList& scored_list,
                           const CorpusMap& corpus, const LcrConfig& config, int parallelism) {
  config.validate();
  ScoredList list = validate_scored_list(scored_list);
  if (list.entries.empty()) {
    throw_error(ErrorCode::empty_input, "query '" + query.query_id + "' has no candidates");
  }

  std::vector<const Document*> docs;
  docs.reserve(list.entries.size());
  for (const auto& entry : list.entries) {
    auto it = corpus.find(entry.doc_id);
    if (it == corpus.end()) {
      throw_error(ErrorCode::missing_document,
                  "doc '" + entry.doc_id + "' for query '" + query.query_id +
                      "' not found in corpus");
    }
    docs.push_back(&it->second);
  }

  std::optional<Confidence> query_conf;
  if (config.query_threshold_enabled) {
    ConfidenceRecord record = confidence_of(service, query, nullptr, config);
    query_conf = Confidence::exact_ratio(record.max_cluster_size(), record.k());
    if (confidence_at_least(*query_conf, Threshold::of(config.t_query))) {
      // Gate fired: keep the prev-score order and skip every document probe.
      std::vector<DocConfidence> entries;
      entries.reserve(list.entries.size());
      for (const auto& entry : list.entries) {
        entries.push_back(DocConfidence{entry.doc_id, Confidence{}, entry.prev_score});
      }
      RerankOutcome outcome = lcr_sort(*query_conf, entries, config, query.query_id);
      return outcome;
    }
  }

  const std::size_t n = list.entries.size();
  std::vector<std::optional<ConfidenceRecord>> records(n);
  std::vector<std::exception_ptr> failures(n);

  const int workers = std::clamp(parallelism, 1, static_cast<int>(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      records[i] = confidence_of(service, query, docs[i], config);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) {
          return;
        }
        try {
          records[i] = confidence_of(service, query, docs[i], config);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) {
      t.join();
    }
    for (const auto& failure : failures) {
      if (failure) {
        std::rethrow_exception(failure);
      }
    }
  }

  std::vector<DocConfidence> entries;
  entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    entries.push_back(DocConfidence{
        list.entries[i].doc_id,
        Confidence::exact_ratio(records[i]->max_cluster_size(), records[i]->k()),
        list.entries[i].prev_score});
  }

  // The gate did not fire (or is disabled); sort with the gate forced off so
  // the low-confidence branch runs regardless of the query confidence value.
  LcrConfig sort_config = config;
  sort_config.query_threshold_enabled = false;
  RerankOutcome outcome = lcr_sort(Confidence{}, entries, sort_config, query.query_id);
  if (query_conf.has_value()) {
    outcome.query_confidence = query_conf->value;
  }
  return outcome;
}

}  // namespace lcr
