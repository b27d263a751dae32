// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include "lcr/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "lcr/prompts.hpp"

namespace lcr {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) != 0) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) {
    tokens.push_back(std::move(current));
  }
  return tokens;
}

InvertedIndex InvertedIndex::build(const std::vector<Document>& corpus) {
  if (corpus.empty()) {
    throw_error(ErrorCode::empty_corpus, "cannot index an empty corpus");
  }
  InvertedIndex index;
  std::unordered_set<std::string> seen_ids;
  seen_ids.reserve(corpus.size());

  long long total_tokens = 0;
  for (std::size_t ordinal = 0; ordinal < corpus.size(); ++ordinal) {
    const Document& doc = corpus[ordinal];
    if (!seen_ids.insert(doc.doc_id).second) {
      throw_error(ErrorCode::duplicate_doc, "doc_id '" + doc.doc_id + "' indexed twice");
    }
    const std::vector<std::string> tokens = tokenize(document_passage(doc));
    index.doc_ids_.push_back(doc.doc_id);
    index.doc_lengths_.push_back(static_cast<int>(tokens.size()));
    total_tokens += static_cast<long long>(tokens.size());

    std::unordered_map<std::string, int> counts;
    for (const auto& token : tokens) {
      ++counts[token];
    }
    for (const auto& [term, tf] : counts) {
      index.postings_[term].push_back(Posting{static_cast<int>(ordinal), tf});
    }
  }
  // Documents are processed in ordinal order, but the per-doc hash iteration
  // above appends terms in arbitrary order; postings stay ordinal-sorted
  // because each document appends at most one posting per term.
  index.avgdl_ =
      static_cast<double>(total_tokens) / static_cast<double>(index.doc_ids_.size());
  return index;
}

const std::vector<Posting>* InvertedIndex::postings(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

namespace {

std::vector<std::string> distinct_in_order(const std::vector<std::string>& tokens) {
  std::vector<std::string> distinct;
  std::unordered_set<std::string> seen;
  for (const auto& token : tokens) {
    if (seen.insert(token).second) {
      distinct.push_back(token);
    }
  }
  return distinct;
}

double idf(int doc_count, int df) {
  return std::log(1.0 + (static_cast<double>(doc_count) - static_cast<double>(df) + 0.5) /
                            (static_cast<double>(df) + 0.5));
}

double term_weight(const Bm25Params& params, int tf, double dl, double avgdl) {
  const double tfd = static_cast<double>(tf);
  return tfd * (params.k1 + 1.0) /
         (tfd + params.k1 * (1.0 - params.b + params.b * dl / avgdl));
}

}  // namespace

double bm25_score(const InvertedIndex& index, const Bm25Params& params,
                  const std::vector<std::string>& query_tokens, int doc_ordinal) {
  double score = 0.0;
  const double dl = static_cast<double>(index.doc_length(doc_ordinal));
  for (const auto& term : distinct_in_order(query_tokens)) {
    const std::vector<Posting>* plist = index.postings(term);
    if (plist == nullptr) {
      continue;
    }
    auto it = std::lower_bound(plist->begin(), plist->end(), doc_ordinal,
                               [](const Posting& p, int ord) { return p.doc_ordinal < ord; });
    if (it == plist->end() || it->doc_ordinal != doc_ordinal) {
      continue;
    }
    score += idf(index.doc_count(), static_cast<int>(plist->size())) *
             term_weight(params, it->term_frequency, dl, index.avgdl());
  }
  return score;
}

ScoredList retrieve_top_k(const InvertedIndex& index, const Bm25Params& params,
                          const Query& query, int k) {
  if (k < 1) {
    throw_error(ErrorCode::empty_input, "retrieval depth must be >= 1");
  }
  const std::vector<std::string> terms = distinct_in_order(tokenize(query.text));

  // Term-at-a-time accumulation in distinct-term order keeps per-document
  // sums identical to bm25_score's loop.
  std::unordered_map<int, double> accumulator;
  for (const auto& term : terms) {
    const std::vector<Posting>* plist = index.postings(term);
    if (plist == nullptr) {
      continue;
    }
    const double term_idf = idf(index.doc_count(), static_cast<int>(plist->size()));
    for (const Posting& posting : *plist) {
      accumulator[posting.doc_ordinal] +=
          term_idf * term_weight(params, posting.term_frequency,
                                 static_cast<double>(index.doc_length(posting.doc_ordinal)),
                                 index.avgdl());
    }
  }

  std::vector<std::pair<double, int>> hits;  // (score, ordinal)
  hits.reserve(accumulator.size());
  for (const auto& [ordinal, score] : accumulator) {
    if (score > 0.0) {
      hits.emplace_back(score, ordinal);
    }
  }
  std::sort(hits.begin(), hits.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) {
      return a.first > b.first;
    }
    return index.doc_id(a.second) < index.doc_id(b.second);
  });
  if (static_cast<int>(hits.size()) > k) {
    hits.resize(static_cast<std::size_t>(k));
  }

  ScoredList list;
  list.query_id = query.query_id;
  int rank = 1;
  for (const auto& [score, ordinal] : hits) {
    list.entries.push_back(ScoredEntry{index.doc_id(ordinal), score, rank++});
  }
  return list;
}

// ---------------------------------------------------------------------------
// Index persistence

namespace {

constexpr char kMagic[8] = {'L', 'C', 'R', 'I', 'N', 'D', 'E', 'X'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
double read_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::string read_string(std::istream& in) {
  std::uint32_t len = read_u32(in);
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  return s;
}

}  // namespace

void InvertedIndex::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out.is_open()) {
    throw_error(ErrorCode::io_error, "cannot write index file '" + path + "'");
  }
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(doc_ids_.size()));
  write_u64(out, postings_.size());
  write_f64(out, avgdl_);
  for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
    write_string(out, doc_ids_[i]);
    write_u32(out, static_cast<std::uint32_t>(doc_lengths_[i]));
  }
  // Terms sorted on disk so the file is deterministic for a given corpus.
  std::vector<const std::string*> terms;
  terms.reserve(postings_.size());
  for (const auto& [term, _] : postings_) {
    terms.push_back(&term);
  }
  std::sort(terms.begin(), terms.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  for (const std::string* term : terms) {
    const auto& plist = postings_.at(*term);
    write_string(out, *term);
    write_u64(out, plist.size());
    for (const Posting& posting : plist) {
      write_u32(out, static_cast<std::uint32_t>(posting.doc_ordinal));
      write_u32(out, static_cast<std::uint32_t>(posting.term_frequency));
    }
  }
  if (!out.good()) {
    throw_error(ErrorCode::io_error, "short write to index file '" + path + "'");
  }
}

InvertedIndex InvertedIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) {
    throw_error(ErrorCode::io_error, "cannot open index file '" + path + "'");
  }
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  if (!in.good() || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw_error(ErrorCode::io_error, "'" + path + "' is not an index file (bad magic)");
  }
  const std::uint32_t version = read_u32(in);
  if (version != kVersion) {
    throw_error(ErrorCode::io_error,
                "index file version " + std::to_string(version) + " unsupported");
  }
  InvertedIndex index;
  const std::uint32_t doc_count = read_u32(in);
  const std::uint64_t term_count = read_u64(in);
  index.avgdl_ = read_f64(in);
  index.doc_ids_.reserve(doc_count);
  index.doc_lengths_.reserve(doc_count);
  for (std::uint32_t i = 0; i < doc_count; ++i) {
    index.doc_ids_.push_back(read_string(in));
    index.doc_lengths_.push_back(static_cast<int>(read_u32(in)));
  }
  for (std::uint64_t t = 0; t < term_count; ++t) {
    std::string term = read_string(in);
    const std::uint64_t plist_len = read_u64(in);
    std::vector<Posting> plist;
    plist.reserve(plist_len);
    for (std::uint64_t p = 0; p < plist_len; ++p) {
      const int ordinal = static_cast<int>(read_u32(in));
      const int tf = static_cast<int>(read_u32(in));
      plist.push_back(Posting{ordinal, tf});
    }
    index.postings_.emplace(std::move(term), std::move(plist));
  }
  if (!in.good()) {
    throw_error(ErrorCode::io_error, "index file '" + path + "' is truncated");
  }
  return index;
}

// ---------------------------------------------------------------------------
// TREC run files

std::map<std::string, ScoredList> load_run(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) {
    throw_error(ErrorCode::io_error, "cannot open run file '" + path + "'");
  }

  struct RawEntry {
    std::string doc_id;
    double score;
    int rank;
  };
  std::map<std::string, std::vector<RawEntry>> by_query;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    std::istringstream fields(line);
    std::string qid, q0, doc_id, rank_text, score_text, tag;
    if (!(fields >> qid >> q0 >> doc_id >> rank_text >> score_text >> tag)) {
      throw_error(ErrorCode::malformed_run_line,
                  "line " + std::to_string(line_no) + " does not have 6 columns");
    }
    std::string extra;
    if (fields >> extra) {
      throw_error(ErrorCode::malformed_run_line,
                  "line " + std::to_string(line_no) + " has more than 6 columns");
    }

    int rank = 0;
    auto [ptr, ec] = std::from_chars(rank_text.data(), rank_text.data() + rank_text.size(), rank);
    if (ec != std::errc() || ptr != rank_text.data() + rank_text.size() || rank < 1) {
      throw_error(ErrorCode::malformed_run_line,
                  "line " + std::to_string(line_no) + " has invalid rank '" + rank_text + "'");
    }
    double score = 0.0;
    try {
      std::size_t consumed = 0;
      score = std::stod(score_text, &consumed);
      if (consumed != score_text.size()) {
        throw std::invalid_argument(score_text);
      }
    } catch (const std::exception&) {
      throw_error(ErrorCode::malformed_run_line,
                  "line " + std::to_string(line_no) + " has invalid score '" + score_text + "'");
    }
    by_query[qid].push_back(RawEntry{doc_id, score, rank});
  }

  std::map<std::string, ScoredList> run;
  for (auto& [qid, raw_entries] : by_query) {
    std::sort(raw_entries.begin(), raw_entries.end(),
              [](const RawEntry& a, const RawEntry& b) { return a.rank < b.rank; });
    ScoredList list;
    list.query_id = qid;
    for (std::size_t i = 0; i < raw_entries.size(); ++i) {
      if (raw_entries[i].rank != static_cast<int>(i) + 1) {
        throw_error(ErrorCode::non_contiguous_ranks,
                    "query '" + qid + "' ranks are not contiguous 1..n (found " +
                        std::to_string(raw_entries[i].rank) + " at position " +
                        std::to_string(i + 1) + ")");
      }
      list.entries.push_back(
          ScoredEntry{raw_entries[i].doc_id, raw_entries[i].score, raw_entries[i].rank});
    }
    run.emplace(qid, validate_scored_list(std::move(list)));
  }
  return run;
}

}  // namespace lcr
