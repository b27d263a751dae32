// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <sstream>
#include <unordered_set>

#include <doctest.h>

#include "lcr/prompts.hpp"
#include "lcr/retrieval.hpp"
#include "support/test_support.hpp"

using namespace lcr;
using lcr_test::TempDir;
using lcr_test::write_file;

namespace {

/// Index-free reference scorer: recomputes df/tf/avgdl by scanning the raw
/// corpus, summing per distinct query term in first-appearance order with the
/// same arithmetic expression as the production scorer.
double brute_force_bm25(const std::vector<Document>& corpus, const Bm25Params& params,
                        const std::string& query_text, std::size_t doc_index) {
  std::vector<std::vector<std::string>> doc_tokens;
  doc_tokens.reserve(corpus.size());
  long long total = 0;
  for (const auto& doc : corpus) {
    doc_tokens.push_back(tokenize(document_passage(doc)));
    total += static_cast<long long>(doc_tokens.back().size());
  }
  const double avgdl = static_cast<double>(total) / static_cast<double>(corpus.size());
  const double dl = static_cast<double>(doc_tokens[doc_index].size());

  std::vector<std::string> distinct;
  std::unordered_set<std::string> seen;
  for (const auto& token : tokenize(query_text)) {
    if (seen.insert(token).second) {
      distinct.push_back(token);
    }
  }

  double score = 0.0;
  for (const auto& term : distinct) {
    int df = 0;
    for (const auto& tokens : doc_tokens) {
      for (const auto& token : tokens) {
        if (token == term) {
          ++df;
          break;
        }
      }
    }
    int tf = 0;
    for (const auto& token : doc_tokens[doc_index]) {
      if (token == term) {
        ++tf;
      }
    }
    if (df == 0 || tf == 0) {
      continue;
    }
    const double idf = std::log(1.0 + (static_cast<double>(corpus.size()) -
                                       static_cast<double>(df) + 0.5) /
                                          (static_cast<double>(df) + 0.5));
    const double tfd = static_cast<double>(tf);
    score += idf * (tfd * (params.k1 + 1.0) /
                    (tfd + params.k1 * (1.0 - params.b + params.b * dl / avgdl)));
  }
  return score;
}

std::vector<Document> random_corpus(std::mt19937& rng, int max_docs) {
  static const std::vector<std::string> vocab = {
      "alpha", "bravo", "charlie", "delta", "echo",  "foxtrot", "golf",  "hotel",
      "india", "juliet", "kilo",   "lima",  "mike",  "november", "oscar", "papa"};
  std::uniform_int_distribution<int> n_docs(1, max_docs);
  std::uniform_int_distribution<int> n_tokens(1, 12);
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);

  std::vector<Document> corpus;
  const int n = n_docs(rng);
  for (int d = 0; d < n; ++d) {
    std::ostringstream text;
    const int len = n_tokens(rng);
    for (int t = 0; t < len; ++t) {
      text << (t > 0 ? " " : "") << vocab[word(rng)];
    }
    corpus.push_back(Document{"doc" + std::to_string(d), "", text.str()});
  }
  return corpus;
}

std::string random_query(std::mt19937& rng) {
  static const std::vector<std::string> vocab = {"alpha", "bravo", "charlie", "delta",
                                                 "echo",  "zulu",  "yankee"};
  std::uniform_int_distribution<int> n_tokens(1, 5);
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::ostringstream out;
  const int len = n_tokens(rng);
  for (int t = 0; t < len; ++t) {
    out << (t > 0 ? " " : "") << vocab[word(rng)];
  }
  return out.str();
}

}  // namespace

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
  CHECK(tokenize("The U.S. President!") ==
        std::vector<std::string>{"the", "u", "s", "president"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("BM25-score") == std::vector<std::string>{"bm25", "score"});
  CHECK(tokenize("   \t\n ") == std::vector<std::string>{});
}

TEST_CASE("tokenization is idempotent over its own output") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> len(0, 60);
  std::uniform_int_distribution<int> chr(32, 126);
  for (int round = 0; round < 300; ++round) {
    std::string text;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      text.push_back(static_cast<char>(chr(rng)));
    }
    const auto once = tokenize(text);
    std::ostringstream joined;
    for (std::size_t i = 0; i < once.size(); ++i) {
      joined << (i > 0 ? " " : "") << once[i];
    }
    CHECK(tokenize(joined.str()) == once);
  }
}

TEST_CASE("index construction counts terms and lengths") {
  const InvertedIndex index = InvertedIndex::build({Document{"d0", "", "a a b"}});
  REQUIRE(index.doc_count() == 1);
  CHECK(index.avgdl() == 3.0);
  const auto* a = index.postings("a");
  REQUIRE(a != nullptr);
  REQUIRE(a->size() == 1);
  CHECK((*a)[0].doc_ordinal == 0);
  CHECK((*a)[0].term_frequency == 2);
  const auto* b = index.postings("b");
  REQUIRE(b != nullptr);
  CHECK((*b)[0].term_frequency == 1);
  CHECK(index.postings("zzz") == nullptr);
}

TEST_CASE("index rejects duplicates and empty corpora") {
  try {
    InvertedIndex::build({Document{"d0", "", "x"}, Document{"d0", "", "y"}});
    FAIL("expected DuplicateDoc");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::duplicate_doc);
  }
  try {
    InvertedIndex::build({});
    FAIL("expected EmptyCorpus");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_corpus);
  }
}

TEST_CASE("avgdl is the mean document length") {
  const InvertedIndex index =
      InvertedIndex::build({Document{"d0", "", "a b"}, Document{"d1", "", "a b c d"}});
  CHECK(index.avgdl() == 3.0);
  CHECK(index.doc_length(0) == 2);
  CHECK(index.doc_length(1) == 4);
}

TEST_CASE("single-document hand-computed score equals ln(4/3)") {
  const InvertedIndex index = InvertedIndex::build({Document{"d0", "", "a b"}});
  const double score = bm25_score(index, Bm25Params{}, {"a"}, 0);
  CHECK(std::abs(score - std::log(4.0 / 3.0)) < 1e-12);
}

TEST_CASE("terms absent from the corpus contribute nothing") {
  const InvertedIndex index = InvertedIndex::build({Document{"d0", "", "a b"}});
  CHECK(bm25_score(index, Bm25Params{}, {"zzz"}, 0) == 0.0);
  CHECK(bm25_score(index, Bm25Params{}, {"zzz", "a"}, 0) ==
        bm25_score(index, Bm25Params{}, {"a"}, 0));
  // Repeated query terms count once.
  CHECK(bm25_score(index, Bm25Params{}, {"a", "a", "a"}, 0) ==
        bm25_score(index, Bm25Params{}, {"a"}, 0));
}

TEST_CASE("indexed scoring equals the brute-force scorer exactly") {
  std::mt19937 rng(29);
  const Bm25Params params;
  for (int round = 0; round < 60; ++round) {
    const std::vector<Document> corpus = random_corpus(rng, 20);
    const InvertedIndex index = InvertedIndex::build(corpus);
    for (int q = 0; q < 10; ++q) {
      const std::string query = random_query(rng);
      const auto tokens = tokenize(query);
      for (std::size_t d = 0; d < corpus.size(); ++d) {
        REQUIRE(bm25_score(index, params, tokens, static_cast<int>(d)) ==
                brute_force_bm25(corpus, params, query, d));
      }
    }
  }
}

TEST_CASE("retrieve_top_k orders, truncates and breaks ties by doc id") {
  const std::vector<Document> corpus = {
      Document{"db", "", "apple apple"},
      Document{"da", "", "apple apple"},  // same content, smaller id
      Document{"dc", "", "apple banana"},
      Document{"dd", "", "cherry"},
  };
  const InvertedIndex index = InvertedIndex::build(corpus);

  const ScoredList top = retrieve_top_k(index, Bm25Params{}, Query{"q1", "apple"}, 10);
  REQUIRE(top.entries.size() == 3);  // dd never matches
  CHECK(top.entries[0].doc_id == "da");  // tie with db broken lexicographically
  CHECK(top.entries[1].doc_id == "db");
  CHECK(top.entries[2].doc_id == "dc");
  CHECK(top.entries[0].prev_score == top.entries[1].prev_score);
  CHECK(top.entries[0].original_rank == 1);
  CHECK(top.entries[2].original_rank == 3);

  const ScoredList top1 = retrieve_top_k(index, Bm25Params{}, Query{"q1", "apple"}, 1);
  CHECK(top1.entries.size() == 1);

  const ScoredList none = retrieve_top_k(index, Bm25Params{}, Query{"q1", "zzz"}, 5);
  CHECK(none.entries.empty());
}

TEST_CASE("top-1 matches the brute-force argmax") {
  std::mt19937 rng(31);
  const Bm25Params params;
  for (int round = 0; round < 40; ++round) {
    const std::vector<Document> corpus = random_corpus(rng, 15);
    const InvertedIndex index = InvertedIndex::build(corpus);
    const std::string query = random_query(rng);

    const ScoredList top = retrieve_top_k(index, params, Query{"q", query}, 1);
    double best = 0.0;
    std::string best_id;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      const double score = brute_force_bm25(corpus, params, query, d);
      if (score > best || (score == best && score > 0.0 && corpus[d].doc_id < best_id)) {
        best = score;
        best_id = corpus[d].doc_id;
      }
    }
    if (best_id.empty()) {
      REQUIRE(top.entries.empty());
    } else {
      REQUIRE(top.entries.size() == 1);
      REQUIRE(top.entries[0].doc_id == best_id);
      REQUIRE(top.entries[0].prev_score == best);
    }
  }
}

TEST_CASE("index save/load round-trips scoring behavior") {
  TempDir dir;
  std::mt19937 rng(37);
  const std::vector<Document> corpus = random_corpus(rng, 12);
  const InvertedIndex index = InvertedIndex::build(corpus);
  const std::string path = dir.file("test.idx");
  index.save(path);

  const InvertedIndex loaded = InvertedIndex::load(path);
  CHECK(loaded.doc_count() == index.doc_count());
  CHECK(loaded.term_count() == index.term_count());
  CHECK(loaded.avgdl() == index.avgdl());
  const auto tokens = tokenize("alpha bravo charlie");
  for (int d = 0; d < index.doc_count(); ++d) {
    CHECK(loaded.doc_id(d) == index.doc_id(d));
    CHECK(bm25_score(loaded, Bm25Params{}, tokens, d) ==
          bm25_score(index, Bm25Params{}, tokens, d));
  }
}

TEST_CASE("index loader rejects foreign and truncated files") {
  TempDir dir;
  const std::string bad = dir.file("bad.idx");
  write_file(bad, "this is not an index");
  try {
    InvertedIndex::load(bad);
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io_error);
  }
  CHECK_THROWS_AS(InvertedIndex::load(dir.file("does_not_exist.idx")), Error);
}

TEST_CASE("run file parsing follows the 6-column format") {
  TempDir dir;
  const std::string good = dir.file("good.run");
  write_file(good,
             "q1 Q0 d7 1 12.5 tag\n"
             "q1 Q0 d3 2 11.0 tag\n"
             "q2 Q0 d1 1 3.25 tag\n");
  const auto run = load_run(good);
  REQUIRE(run.size() == 2);
  REQUIRE(run.at("q1").entries.size() == 2);
  CHECK(run.at("q1").entries[0].doc_id == "d7");
  CHECK(run.at("q1").entries[0].prev_score == 12.5);
  CHECK(run.at("q1").entries[0].original_rank == 1);
  CHECK(run.at("q2").entries[0].doc_id == "d1");

  const std::string five_col = dir.file("five.run");
  write_file(five_col, "q1 Q0 d7 1 12.5\n");
  try {
    load_run(five_col);
    FAIL("expected MalformedRunLine");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_run_line);
  }

  const std::string seven_col = dir.file("seven.run");
  write_file(seven_col, "q1 Q0 d7 1 12.5 tag extra\n");
  CHECK_THROWS_AS(load_run(seven_col), Error);

  const std::string gap = dir.file("gap.run");
  write_file(gap, "q1 Q0 d7 1 12.5 tag\nq1 Q0 d3 3 11.0 tag\n");
  try {
    load_run(gap);
    FAIL("expected NonContiguousRanks");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_contiguous_ranks);
  }

  const std::string bad_rank = dir.file("bad_rank.run");
  write_file(bad_rank, "q1 Q0 d7 one 12.5 tag\n");
  CHECK_THROWS_AS(load_run(bad_rank), Error);
}
