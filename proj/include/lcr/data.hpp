// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "lcr/rerank.hpp"
#include "lcr/types.hpp"

namespace lcr {

/// Line-delimited JSON with fields _id, title (optional) and text.
CorpusMap load_corpus(const std::string& path);

/// Line-delimited JSON with fields _id and text.
QueryMap load_queries(const std::string& path);

enum class QrelsFormat { beir_tsv, trec4col };

/// beir_tsv: "query-id<TAB>corpus-id<TAB>score" with an optional header line.
/// trec4col: "qid 0 docid grade".
std::vector<RelevanceJudgment> load_qrels(const std::string& path, QrelsFormat format);

struct DatasetBundle {
  CorpusMap corpus;
  QueryMap queries;
  std::vector<RelevanceJudgment> qrels;
};

/// Loads all three files and applies the cross-reference rules: judgments for
/// unknown queries are dropped with a warning, judgments for documents absent
/// from the corpus are kept but logged.
DatasetBundle load_dataset(const std::string& corpus_path, const std::string& queries_path,
                           const std::string& qrels_path, QrelsFormat format);

/// Standard 6-column run lines, sorted by query_id then rank. When bins were
/// applied the score column carries the rank-derived value n-rank+1 so it
/// stays strictly decreasing; gated outcomes keep their prev scores.
void write_run(const std::vector<RerankOutcome>& outcomes, const std::string& tag,
               const std::string& path);

/// Run writer for plain retrieval output: scores are the prev scores.
void write_run(const std::map<std::string, ScoredList>& run, const std::string& tag,
               const std::string& path);

/// Line-delimited rerank provenance (bins, confidences, gate decisions),
/// prefixed by a header record naming the config hash.
void write_diagnostics(const std::vector<RerankOutcome>& outcomes,
                       const std::string& config_hash, const std::string& path);

}  // namespace lcr
