// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lcr/types.hpp"

namespace lcr {

/// Lowercases and splits on every non-alphanumeric byte; empty tokens are
/// dropped. No stemming, no stopword removal.
std::vector<std::string> tokenize(std::string_view text);

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;
};

struct Posting {
  int doc_ordinal = 0;
  int term_frequency = 0;
};

class InvertedIndex {
 public:
  /// Indexes title and body (joined by a single space) of every document.
  static InvertedIndex build(const std::vector<Document>& corpus);

  int doc_count() const { return static_cast<int>(doc_ids_.size()); }
  std::size_t term_count() const { return postings_.size(); }
  double avgdl() const { return avgdl_; }
  int doc_length(int ordinal) const { return doc_lengths_[static_cast<std::size_t>(ordinal)]; }
  const std::string& doc_id(int ordinal) const {
    return doc_ids_[static_cast<std::size_t>(ordinal)];
  }
  const std::vector<Posting>* postings(const std::string& term) const;

  /// Binary, versioned on-disk format ("LCRINDEX" magic).
  void save(const std::string& path) const;
  static InvertedIndex load(const std::string& path);

 private:
  std::vector<std::string> doc_ids_;
  std::vector<int> doc_lengths_;
  double avgdl_ = 0.0;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

/// Sum over distinct query terms of idf * tf*(k1+1) / (tf + k1*(1-b+b*dl/avgdl))
/// with idf = ln(1 + (N-df+0.5)/(df+0.5)). Terms missing from the document
/// contribute nothing; repeated query terms count once.
double bm25_score(const InvertedIndex& index, const Bm25Params& params,
                  const std::vector<std::string>& query_tokens, int doc_ordinal);

/// Top-k documents by score descending; ties break by doc_id ascending. Only
/// documents with positive score are returned, so the list may be short.
ScoredList retrieve_top_k(const InvertedIndex& index, const Bm25Params& params,
                          const Query& query, int k);

/// Parses a 6-column TREC run file ("qid Q0 docid rank score tag") into
/// per-query lists ordered by the rank column.
std::map<std::string, ScoredList> load_run(const std::string& path);

}  // namespace lcr
