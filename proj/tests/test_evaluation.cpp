// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include "lcr/evaluation.hpp"

using namespace lcr;

TEST_CASE("dcg matches hand-computed fixtures") {
  CHECK(std::abs(dcg_at_k({3, 2, 0}, 3) - 4.261859507142915) < 1e-9);
  CHECK(std::abs(dcg_at_k({3, 2, 0}, 3) - (3.0 + 2.0 / (std::log(3.0) / std::log(2.0)))) < 1e-12);
  CHECK(dcg_at_k({}, 4) == 0.0);
  CHECK(dcg_at_k({1}, 5) == 1.0);
  CHECK(dcg_at_k({3, 2, 0, 7, 9}, 2) == dcg_at_k({3, 2}, 2));  // cutoff
  CHECK_THROWS_AS(dcg_at_k({1}, 0), Error);
}

TEST_CASE("ndcg normalizes by the ideal ordering of all judged docs") {
  // Ranked [unjudged, dA] against qrels {dA: 3}.
  const double value = ndcg_at_k({"dX", "dA"}, {{"dA", 3}}, 2);
  CHECK(std::abs(value - 0.6309297535714574) < 1e-9);

  // A ranking that is its own ideal scores exactly 1.
  CHECK(ndcg_at_k({"d1", "d2", "d3"}, {{"d1", 3}, {"d2", 2}, {"d3", 1}}, 3) == 1.0);

  // No positively judged documents: 0 by convention.
  CHECK(ndcg_at_k({"d1"}, {{"d1", 0}}, 5) == 0.0);
  CHECK(ndcg_at_k({"d1"}, {}, 5) == 0.0);

  // Judged-but-unretrieved documents count toward the ideal.
  const double partial = ndcg_at_k({"d2"}, {{"d1", 3}, {"d2", 1}}, 2);
  CHECK(partial < 1.0);
  CHECK(partial > 0.0);
}

TEST_CASE("ndcg is scale-bounded and ideal-invariant over random fixtures") {
  std::mt19937 rng(41);
  std::uniform_int_distribution<int> grade(0, 3);
  std::uniform_int_distribution<int> judged_count(1, 12);
  std::uniform_int_distribution<int> k_dist(1, 10);

  for (int round = 0; round < 500; ++round) {
    const int judged = judged_count(rng);
    std::map<std::string, int> qrels;
    for (int d = 0; d < judged; ++d) {
      qrels["d" + std::to_string(d)] = grade(rng);
    }

    // Random ranking mixing judged and unjudged ids.
    std::vector<std::string> ranked;
    for (int d = 0; d < judged + 3; ++d) {
      ranked.push_back("d" + std::to_string(d));
    }
    std::shuffle(ranked.begin(), ranked.end(), rng);
    const int k = k_dist(rng);
    const double value = ndcg_at_k(ranked, qrels, k);
    REQUIRE(value >= 0.0);
    REQUIRE(value <= 1.0);

    // The grade-descending ordering of the judged docs scores exactly 1
    // whenever anything is positively judged.
    std::vector<std::string> ideal;
    for (const auto& [doc_id, _] : qrels) {
      ideal.push_back(doc_id);
    }
    std::sort(ideal.begin(), ideal.end(), [&](const std::string& a, const std::string& b) {
      return qrels.at(a) > qrels.at(b);
    });
    bool any_positive = false;
    for (const auto& [_, g] : qrels) {
      any_positive = any_positive || g > 0;
    }
    REQUIRE(ndcg_at_k(ideal, qrels, k) == (any_positive ? 1.0 : 0.0));
  }
}

TEST_CASE("permuting zero-grade tail documents never changes ndcg") {
  std::map<std::string, int> qrels{{"d1", 2}, {"d2", 1}};
  const std::vector<std::string> base = {"d1", "d2", "x1", "x2", "x3"};
  const double reference = ndcg_at_k(base, qrels, 2);
  CHECK(ndcg_at_k({"d1", "d2", "x3", "x1", "x2"}, qrels, 2) == reference);
  CHECK(ndcg_at_k({"d1", "d2", "x2", "x3", "x1"}, qrels, 2) == reference);
}

TEST_CASE("evaluate_run averages judged queries and skips the rest") {
  std::map<std::string, ScoredList> run;
  run["q1"] = ScoredList{"q1", {{"d1", 2.0, 1}, {"d2", 1.0, 2}}};
  run["q2"] = ScoredList{"q2", {{"d9", 2.0, 1}}};
  run["q3"] = ScoredList{"q3", {{"d1", 2.0, 1}}};  // no judgments

  QrelsTable qrels;
  qrels["q1"] = {{"d1", 1}};            // ideal order -> 1.0
  qrels["q2"] = {{"d1", 1}, {"d9", 0}};  // relevant doc missing -> 0.0

  const EvalReport report = evaluate_run(run, qrels, 5);
  CHECK(report.judged_query_count == 2);
  CHECK(report.unjudged_query_count == 1);
  CHECK(report.per_query.at("q1") == 1.0);
  CHECK(report.per_query.at("q2") == 0.0);
  CHECK(report.mean_ndcg == 0.5);

  QrelsTable disjoint;
  disjoint["zz"] = {{"d1", 1}};
  try {
    evaluate_run(run, disjoint, 5);
    FAIL("expected EmptyIntersection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_intersection);
  }
}

TEST_CASE("evaluate_run composes per-query ndcg") {
  std::map<std::string, ScoredList> run;
  run["a"] = ScoredList{"a", {{"d1", 3.0, 1}, {"d2", 2.0, 2}}};
  run["b"] = ScoredList{"b", {{"d2", 3.0, 1}, {"d1", 2.0, 2}}};
  run["c"] = ScoredList{"c", {{"d3", 3.0, 1}}};
  QrelsTable qrels;
  qrels["a"] = {{"d1", 2}, {"d2", 1}};
  qrels["b"] = {{"d1", 2}, {"d2", 1}};
  qrels["c"] = {{"d3", 1}, {"d4", 3}};

  const EvalReport report = evaluate_run(run, qrels, 3);
  double expected = 0.0;
  expected += ndcg_at_k({"d1", "d2"}, qrels["a"], 3);
  expected += ndcg_at_k({"d2", "d1"}, qrels["b"], 3);
  expected += ndcg_at_k({"d3"}, qrels["c"], 3);
  expected /= 3.0;
  CHECK(report.mean_ndcg == expected);
}

TEST_CASE("binarize follows the positive-grade rule") {
  CHECK(binarize(0) == 0);
  CHECK(binarize(1) == 1);
  CHECK(binarize(2) == 1);
  CHECK(binarize(17) == 1);
  try {
    binarize(-1);
    FAIL("expected MalformedRecord");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_record);
  }
}

TEST_CASE("calibration bins partition the unit interval") {
  SUBCASE("all mass at full confidence") {
    std::vector<std::pair<double, int>> records(17, {1.0, 1});
    const auto bins = calibration_curve(records);
    CHECK(bins[9].sample_count == 17);
    CHECK(bins[9].relevant_proportion == 1.0);
    for (int b = 0; b < 9; ++b) {
      CHECK(bins[static_cast<std::size_t>(b)].sample_count == 0);
      CHECK(bins[static_cast<std::size_t>(b)].relevant_proportion == 0.0);
    }
  }

  SUBCASE("half-relevant low bin") {
    const auto bins = calibration_curve({{0.05, 0}, {0.05, 1}});
    CHECK(bins[0].sample_count == 2);
    CHECK(bins[0].relevant_proportion == 0.5);
  }

  SUBCASE("boundaries are half-open") {
    const auto bins = calibration_curve({{0.1, 1}, {0.7, 1}, {0.999, 0}});
    CHECK(bins[1].sample_count == 1);  // 0.1 belongs to [0.1, 0.2)
    CHECK(bins[0].sample_count == 0);
    CHECK(bins[7].sample_count == 1);  // 0.7 belongs to [0.7, 0.8)
    CHECK(bins[9].sample_count == 1);
  }

  SUBCASE("counts always sum to the input size") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::pair<double, int>> records;
    for (int i = 0; i < 500; ++i) {
      records.emplace_back(unit(rng), static_cast<int>(rng() % 2));
    }
    const auto bins = calibration_curve(records);
    long long total = 0;
    for (const auto& bin : bins) {
      total += bin.sample_count;
      CHECK(bin.relevant_proportion >= 0.0);
      CHECK(bin.relevant_proportion <= 1.0);
    }
    CHECK(total == 500);
  }
}

// ---------------------------------------------------------------------------
// Threshold sweeps over a hand-checkable toy fixture.

namespace {

SweepInputs toy_inputs() {
  SweepInputs inputs;
  inputs.run["q1"] = ScoredList{
      "q1", {{"a", 4.0, 1}, {"b", 3.0, 2}, {"c", 2.0, 3}, {"d", 1.0, 4}}};
  inputs.run["q2"] = ScoredList{"q2", {{"e", 3.0, 1}, {"f", 2.0, 2}, {"g", 1.0, 3}}};
  inputs.qrels["q1"] = {{"b", 2}, {"c", 1}};
  inputs.qrels["q2"] = {{"g", 1}, {"e", 0}};

  auto ratio = [](int m) { return Confidence::exact_ratio(m, 10); };
  inputs.doc_confidence[{"q1", "a"}] = ratio(3);
  inputs.doc_confidence[{"q1", "b"}] = ratio(10);
  inputs.doc_confidence[{"q1", "c"}] = ratio(9);
  inputs.doc_confidence[{"q1", "d"}] = ratio(5);
  inputs.doc_confidence[{"q2", "e"}] = ratio(2);
  inputs.doc_confidence[{"q2", "f"}] = ratio(2);
  inputs.doc_confidence[{"q2", "g"}] = ratio(8);
  inputs.query_confidence["q1"] = ratio(4);
  inputs.query_confidence["q2"] = ratio(9);
  inputs.base_config.k_samples = 10;
  inputs.ndcg_k = 5;
  return inputs;
}

/// Independent re-derivation of one sweep cell: integer-arithmetic bins
/// (confidences are m/10 and thresholds are exact tenths), stable sort,
/// then the same ndcg/mean/delta arithmetic.
double oracle_mean(const SweepInputs& inputs, int lt_tenths, int ut_tenths,
                   int qt_tenths /* -1: gate disabled */) {
  double sum = 0.0;
  int count = 0;
  for (const auto& [query_id, list] : inputs.run) {
    if (inputs.qrels.find(query_id) == inputs.qrels.end()) {
      continue;
    }
    bool gated = false;
    if (qt_tenths >= 0) {
      const Confidence& qc = inputs.query_confidence.at(query_id);
      gated = qc.num >= qt_tenths;  // qc = num/10, threshold = qt_tenths/10
    }

    std::vector<std::size_t> order(list.entries.size());
    std::iota(order.begin(), order.end(), 0);
    if (!gated) {
      std::vector<int> bins(list.entries.size());
      for (std::size_t i = 0; i < list.entries.size(); ++i) {
        const Confidence& c = inputs.doc_confidence.at({query_id, list.entries[i].doc_id});
        bins[i] = c.num >= ut_tenths ? 1 : (c.num <= lt_tenths ? -1 : 0);
      }
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (bins[x] != bins[y]) {
          return bins[x] > bins[y];
        }
        return list.entries[x].prev_score > list.entries[y].prev_score;
      });
    } else {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return list.entries[x].prev_score > list.entries[y].prev_score;
      });
    }

    std::vector<std::string> ranked;
    for (std::size_t i : order) {
      ranked.push_back(list.entries[i].doc_id);
    }
    sum += ndcg_at_k(ranked, inputs.qrels.at(query_id), inputs.ndcg_k);
    ++count;
  }
  return sum / count;
}

}  // namespace

TEST_CASE("document-threshold sweep matches the hand-applied grid") {
  const SweepInputs inputs = toy_inputs();
  const auto cells =
      sweep_document_thresholds(inputs, tenth_grid(1, 9), tenth_grid(2, 10), std::nullopt);
  CHECK(cells.size() == 45);  // only lt < ut survives the 9x9 grid

  const double base = oracle_mean(inputs, 0, 11, 0);  // everything gated = prev order
  for (const auto& cell : cells) {
    REQUIRE(cell.t_lower < cell.t_upper);
    const int lt = static_cast<int>(std::lround(cell.t_lower * 10));
    const int ut = static_cast<int>(std::lround(cell.t_upper * 10));
    const double expected = 100.0 * (oracle_mean(inputs, lt, ut, -1) - base) / base;
    REQUIRE(cell.ndcg_delta_percent == expected);
  }
}

TEST_CASE("query-threshold sweep reproduces the baseline at qt=0") {
  const SweepInputs inputs = toy_inputs();
  const auto curve = sweep_query_threshold(inputs, tenth_grid(0, 10));
  REQUIRE(curve.size() == 11);
  CHECK(curve[0].first == 0.0);

  const double baseline = oracle_mean(inputs, 0, 11, 0);
  CHECK(curve[0].second == baseline);  // bit-exact

  const int lt_tenths = static_cast<int>(std::lround(inputs.base_config.t_lower * 10));
  const int ut_tenths = static_cast<int>(std::lround(inputs.base_config.t_upper * 10));
  for (const auto& [qt, mean] : curve) {
    const int qt_tenths = static_cast<int>(std::lround(qt * 10));
    REQUIRE(mean == oracle_mean(inputs, lt_tenths, ut_tenths, qt_tenths));
  }
}

TEST_CASE("sweeps are deterministic and fail without cached confidences") {
  const SweepInputs inputs = toy_inputs();
  const auto first =
      sweep_document_thresholds(inputs, tenth_grid(1, 9), tenth_grid(2, 10), std::nullopt);
  const auto second =
      sweep_document_thresholds(inputs, tenth_grid(1, 9), tenth_grid(2, 10), std::nullopt);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].ndcg_delta_percent == second[i].ndcg_delta_percent);
  }

  SweepInputs missing = inputs;
  missing.doc_confidence.erase({"q1", "c"});
  try {
    sweep_document_thresholds(missing, tenth_grid(1, 9), tenth_grid(2, 10), std::nullopt);
    FAIL("expected MissingConfidenceCache");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_confidence_cache);
  }

  SweepInputs no_query_conf = inputs;
  no_query_conf.query_confidence.erase("q2");
  CHECK_THROWS_AS(sweep_query_threshold(no_query_conf, tenth_grid(5, 10)), Error);
}

TEST_CASE("tenth_grid spans inclusive tenths") {
  const auto grid = tenth_grid(1, 9);
  REQUIRE(grid.size() == 9);
  CHECK(grid.front() == 0.1);
  CHECK(grid.back() == 0.9);
  CHECK(tenth_grid(0, 10).size() == 11);
}
