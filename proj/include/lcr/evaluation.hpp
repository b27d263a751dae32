// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lcr/rerank.hpp"
#include "lcr/types.hpp"

namespace lcr {

/// Sum over the first min(k, n) positions of rel_i / log2(i+1).
double dcg_at_k(const std::vector<int>& rels_in_rank_order, int k);

/// DCG of the ranked list (unjudged documents count as grade 0) divided by
/// the ideal DCG over all judged documents for the query. 0 when no document
/// is positively judged.
double ndcg_at_k(const std::vector<std::string>& ranked_doc_ids,
                 const std::map<std::string, int>& qrels_for_query, int k);

struct EvalReport {
  std::map<std::string, double> per_query;
  double mean_ndcg = 0.0;
  int k = 0;
  int judged_query_count = 0;    // queries scored (present in run and qrels)
  int unjudged_query_count = 0;  // run queries skipped for lack of judgments
};

EvalReport evaluate_run(const std::map<std::string, ScoredList>& run, const QrelsTable& qrels,
                        int k);

/// 1 when the grade is positive, else 0.
int binarize(int grade);

struct CalibrationBin {
  int index = 0;
  double lo = 0.0;
  double hi = 0.0;  // exclusive except for the last bin
  double relevant_proportion = 0.0;
  long long sample_count = 0;
};

/// Ten uniform confidence bins [0,0.1), ..., [0.9,1.0]; each reports the
/// proportion of relevant records among those falling in it.
std::array<CalibrationBin, 10> calibration_curve(
    const std::vector<std::pair<double, int>>& records);

/// Cached confidences a sweep re-sorts from. Sweeps never call a backend.
struct SweepInputs {
  std::map<std::string, ScoredList> run;
  QrelsTable qrels;
  std::map<std::string, Confidence> query_confidence;
  std::map<std::pair<std::string, std::string>, Confidence> doc_confidence;
  LcrConfig base_config;
  int ndcg_k = 5;
};

struct SweepCell {
  double t_lower = 0.0;
  double t_upper = 0.0;
  double ndcg_delta_percent = 0.0;
};

/// Re-sorts every query for each valid (lt, ut) pair (lt < ut) and reports
/// the mean-NDCG change against the prev-score baseline in percent. With
/// `fixed_qt` unset the query gate is disabled for every cell.
std::vector<SweepCell> sweep_document_thresholds(const SweepInputs& inputs,
                                                 const std::vector<double>& lt_grid,
                                                 const std::vector<double>& ut_grid,
                                                 std::optional<double> fixed_qt);

/// Mean NDCG per query-threshold value. The qt = 0 entry reproduces the
/// baseline exactly: every query keeps its prev-score order.
std::vector<std::pair<double, double>> sweep_query_threshold(const SweepInputs& inputs,
                                                             const std::vector<double>& qt_grid);

/// Uniform grid helper: {from, from+0.1, ..., to} built from exact tenths.
std::vector<double> tenth_grid(int from_tenths, int to_tenths);

}  // namespace lcr
