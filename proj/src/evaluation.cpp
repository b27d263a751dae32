// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include "lcr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lcr {

double dcg_at_k(const std::vector<int>& rels_in_rank_order, int k) {
  if (k < 1) {
    throw_error(ErrorCode::empty_input, "dcg cutoff must be >= 1");
  }
  const std::size_t limit = std::min(rels_in_rank_order.size(), static_cast<std::size_t>(k));
  double dcg = 0.0;
  for (std::size_t i = 0; i < limit; ++i) {
    dcg += static_cast<double>(rels_in_rank_order[i]) / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg;
}

double ndcg_at_k(const std::vector<std::string>& ranked_doc_ids,
                 const std::map<std::string, int>& qrels_for_query, int k) {
  std::vector<int> rels;
  rels.reserve(ranked_doc_ids.size());
  for (const auto& doc_id : ranked_doc_ids) {
    auto it = qrels_for_query.find(doc_id);
    rels.push_back(it == qrels_for_query.end() ? 0 : it->second);
  }

  // Ideal ordering over all judged documents, not just retrieved ones.
  std::vector<int> ideal;
  ideal.reserve(qrels_for_query.size());
  for (const auto& [_, grade] : qrels_for_query) {
    ideal.push_back(grade);
  }
  std::sort(ideal.begin(), ideal.end(), std::greater<>());

  const double idcg = dcg_at_k(ideal, k);
  if (idcg == 0.0) {
    return 0.0;
  }
  return dcg_at_k(rels, k) / idcg;
}

EvalReport evaluate_run(const std::map<std::string, ScoredList>& run, const QrelsTable& qrels,
                        int k) {
  EvalReport report;
  report.k = k;
  double sum = 0.0;
  for (const auto& [query_id, list] : run) {
    auto it = qrels.find(query_id);
    if (it == qrels.end()) {
      ++report.unjudged_query_count;
      continue;
    }
    std::vector<std::string> ranked;
    ranked.reserve(list.entries.size());
    for (const auto& entry : list.entries) {
      ranked.push_back(entry.doc_id);
    }
    const double value = ndcg_at_k(ranked, it->second, k);
    report.per_query.emplace(query_id, value);
    sum += value;
  }
  if (report.per_query.empty()) {
    throw_error(ErrorCode::empty_intersection, "no query appears in both run and qrels");
  }
  report.judged_query_count = static_cast<int>(report.per_query.size());
  report.mean_ndcg = sum / static_cast<double>(report.judged_query_count);
  return report;
}

int binarize(int grade) {
  if (grade < 0) {
    throw_error(ErrorCode::malformed_record, "negative relevance grade " + std::to_string(grade));
  }
  return grade > 0 ? 1 : 0;
}

std::array<CalibrationBin, 10> calibration_curve(
    const std::vector<std::pair<double, int>>& records) {
  std::array<CalibrationBin, 10> bins{};
  for (int b = 0; b < 10; ++b) {
    bins[static_cast<std::size_t>(b)].index = b;
    bins[static_cast<std::size_t>(b)].lo = static_cast<double>(b) / 10.0;
    bins[static_cast<std::size_t>(b)].hi = static_cast<double>(b + 1) / 10.0;
  }

  std::array<long long, 10> relevant{};
  for (const auto& [confidence, rel] : records) {
    int bin = 9;
    for (int b = 0; b < 9; ++b) {
      if (confidence < static_cast<double>(b + 1) / 10.0) {
        bin = b;
        break;
      }
    }
    ++bins[static_cast<std::size_t>(bin)].sample_count;
    relevant[static_cast<std::size_t>(bin)] += rel != 0 ? 1 : 0;
  }
  for (int b = 0; b < 10; ++b) {
    const auto& count = bins[static_cast<std::size_t>(b)].sample_count;
    bins[static_cast<std::size_t>(b)].relevant_proportion =
        count == 0 ? 0.0
                   : static_cast<double>(relevant[static_cast<std::size_t>(b)]) /
                         static_cast<double>(count);
  }
  return bins;
}

// ---------------------------------------------------------------------------
// Threshold sweeps

namespace {

double outcome_ndcg(const RerankOutcome& outcome, const std::map<std::string, int>& qrels_for_query,
                    int k) {
  std::vector<std::string> ranked;
  ranked.reserve(outcome.entries.size());
  for (const auto& entry : outcome.entries) {
    ranked.push_back(entry.doc_id);
  }
  return ndcg_at_k(ranked, qrels_for_query, k);
}

const Confidence& require_doc_confidence(const SweepInputs& inputs, const std::string& query_id,
                                         const std::string& doc_id) {
  auto it = inputs.doc_confidence.find({query_id, doc_id});
  if (it == inputs.doc_confidence.end()) {
    throw_error(ErrorCode::missing_confidence_cache,
                "no cached confidence for query '" + query_id + "', doc '" + doc_id + "'");
  }
  return it->second;
}

const Confidence& require_query_confidence(const SweepInputs& inputs,
                                           const std::string& query_id) {
  auto it = inputs.query_confidence.find(query_id);
  if (it == inputs.query_confidence.end()) {
    throw_error(ErrorCode::missing_confidence_cache,
                "no cached query confidence for '" + query_id + "'");
  }
  return it->second;
}

/// Mean NDCG over judged queries after re-sorting each one under `config`.
/// Gate decisions use the cached query confidence; the prev-score baseline is
/// obtained with the gate pinned open (t_query = 0).
double mean_ndcg_under(const SweepInputs& inputs, const LcrConfig& config) {
  double sum = 0.0;
  int count = 0;
  for (const auto& [query_id, list] : inputs.run) {
    auto judged = inputs.qrels.find(query_id);
    if (judged == inputs.qrels.end()) {
      continue;
    }

    Confidence query_conf = Confidence::exact_ratio(0, 1);
    if (config.query_threshold_enabled && config.t_query > 0.0) {
      query_conf = require_query_confidence(inputs, query_id);
    }

    std::vector<DocConfidence> entries;
    entries.reserve(list.entries.size());
    const bool gate_always_fires = config.query_threshold_enabled && config.t_query == 0.0;
    const bool will_gate =
        config.query_threshold_enabled &&
        (gate_always_fires || confidence_at_least(query_conf, Threshold::of(config.t_query)));
    for (const auto& entry : list.entries) {
      // Document confidences are only needed on the sorting branch.
      Confidence conf = will_gate ? Confidence{}
                                  : require_doc_confidence(inputs, query_id, entry.doc_id);
      entries.push_back(DocConfidence{entry.doc_id, conf, entry.prev_score});
    }

    RerankOutcome outcome = lcr_sort(query_conf, entries, config, query_id);
    sum += outcome_ndcg(outcome, judged->second, inputs.ndcg_k);
    ++count;
  }
  if (count == 0) {
    throw_error(ErrorCode::empty_intersection, "no query appears in both run and qrels");
  }
  return sum / static_cast<double>(count);
}

LcrConfig baseline_config(const SweepInputs& inputs) {
  LcrConfig config = inputs.base_config;
  config.query_threshold_enabled = true;
  config.t_query = 0.0;
  return config;
}

}  // namespace

std::vector<SweepCell> sweep_document_thresholds(const SweepInputs& inputs,
                                                 const std::vector<double>& lt_grid,
                                                 const std::vector<double>& ut_grid,
                                                 std::optional<double> fixed_qt) {
  const double base = mean_ndcg_under(inputs, baseline_config(inputs));

  std::vector<SweepCell> cells;
  for (double lt : lt_grid) {
    for (double ut : ut_grid) {
      if (!(lt < ut)) {
        continue;
      }
      LcrConfig config = inputs.base_config;
      config.t_lower = lt;
      config.t_upper = ut;
      config.query_threshold_enabled = fixed_qt.has_value();
      config.t_query = fixed_qt.value_or(0.0);

      const double value = mean_ndcg_under(inputs, config);
      double delta = 0.0;
      if (base != 0.0) {
        delta = 100.0 * (value - base) / base;
      } else if (value != 0.0) {
        delta = std::numeric_limits<double>::infinity();
      }
      cells.push_back(SweepCell{lt, ut, delta});
    }
  }
  return cells;
}

std::vector<std::pair<double, double>> sweep_query_threshold(const SweepInputs& inputs,
                                                             const std::vector<double>& qt_grid) {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(qt_grid.size());
  for (double qt : qt_grid) {
    LcrConfig config = inputs.base_config;
    config.query_threshold_enabled = true;
    config.t_query = qt;
    curve.emplace_back(qt, mean_ndcg_under(inputs, config));
  }
  return curve;
}

std::vector<double> tenth_grid(int from_tenths, int to_tenths) {
  std::vector<double> grid;
  for (int i = from_tenths; i <= to_tenths; ++i) {
    grid.push_back(static_cast<double>(i) / 10.0);
  }
  return grid;
}

}  // namespace lcr
