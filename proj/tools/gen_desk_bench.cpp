// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0
//
// Regenerates the bundled synthetic benchmark (data/desk_bench): 10 queries,
// 50 documents, graded qrels and a scripted-backend fixture whose confidences
// correlate with the judgments. Each query group holds two relevant documents
// that BM25 underranks (distractors repeat the query terms more often), so
// confidence reranking visibly lifts ndcg@5.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcr/prompts.hpp"
#include "lcr/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kSubjects = {"aurora", "basalt", "cedar",  "dune", "ember",
                                            "fjord",  "glacier", "harbor", "iris", "juniper"};

// Shared low-confidence answer vocabulary (per query); relevant documents get
// their own single repeated answer so clustering needs no entailment calls.
const std::vector<std::string> kAltAnswers = {
    "an unrelated seasonal pattern", "a disputed folk explanation", "a rounding artifact",
    "an instrument calibration issue", "an unverified rumor"};

struct Doc {
  std::string id;
  std::string title;
  std::string text;
  int grade;  // -1: unjudged
};

std::vector<Doc> group_docs(int group, const std::string& s) {
  char prefix[16];
  std::snprintf(prefix, sizeof(prefix), "d%02d", group);
  const std::string p(prefix);
  return {
      {p + "1", s + " effect", // tf(s) = 2: strongest relevant doc
       "Researchers explain that the " + s +
           " effect follows from charged particles colliding above the poles.",
       2},
      {p + "2", "field notes", // tf(s) = 1
       "Observers describe how the " + s + " effect appears during strong magnetic storms.", 1},
      {p + "3", s + " chronicle", // tf(s) = 4: repeats the query terms, no substance
       "The " + s + " effect, the " + s + " effect, and again the " + s +
           " effect dominate this almanac of curiosities.",
       0},
      {p + "4", s + " gazette",
       "A gazette column mentions the " + s + " effect, the " + s + " effect, and the " + s +
           " effect without any detail.",
       -1},
      {p + "5", s + " daily",
       "Daily trivia repeats the " + s + " effect, the " + s + " effect, and the " + s +
           " effect for readers.",
       -1},
  };
}

json answer_fixture(const std::string& prompt, const std::vector<std::string>& answers) {
  return json{{"prompt", prompt}, {"role", "answer"}, {"answers", answers}};
}

std::vector<std::string> spread_answers(const std::string& a, const std::string& b,
                                        const std::string& c, const std::string& d,
                                        const std::string& e) {
  return {a, a, a, b, b, b, c, c, d, e};  // cluster sizes {3,3,2,1,1} -> mscp 0.3
}

std::vector<std::string> medium_answers(const std::string& a, const std::string& b,
                                        const std::string& c) {
  return {a, a, a, a, a, b, b, b, c, c};  // cluster sizes {5,3,2} -> mscp 0.5
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_dir = argc > 1 ? argv[1] : "data/desk_bench";
  fs::create_directories(out_dir);

  std::ofstream corpus(fs::path(out_dir) / "corpus.jsonl");
  std::ofstream queries(fs::path(out_dir) / "queries.jsonl");
  std::ofstream qrels(fs::path(out_dir) / "qrels.tsv");
  std::ofstream fixtures(fs::path(out_dir) / "fixtures.jsonl");
  qrels << "query-id\tcorpus-id\tscore\n";

  std::vector<lcr::Query> all_queries;
  std::vector<lcr::Document> all_docs;
  std::map<std::string, int> grade_by_doc;  // within the owning group

  for (int g = 0; g < 10; ++g) {
    const std::string& subject = kSubjects[static_cast<std::size_t>(g)];
    char qid[16];
    std::snprintf(qid, sizeof(qid), "q%02d", g + 1);
    lcr::Query query{qid, "what causes the " + subject + " effect"};
    all_queries.push_back(query);
    queries << json{{"_id", query.query_id}, {"text", query.text}}.dump() << "\n";

    for (const Doc& doc : group_docs(g + 1, subject)) {
      corpus << json{{"_id", doc.id}, {"title", doc.title}, {"text", doc.text}}.dump() << "\n";
      all_docs.push_back(lcr::Document{doc.id, doc.title, doc.text});
      if (doc.grade >= 0) {
        qrels << query.query_id << "\t" << doc.id << "\t" << doc.grade << "\n";
      }
      grade_by_doc[doc.id] = doc.grade;
    }
  }

  for (const lcr::Query& query : all_queries) {
    const int group = std::stoi(query.query_id.substr(1));
    const std::string& subject = kSubjects[static_cast<std::size_t>(group - 1)];
    const std::string relevant_answer = "charged " + subject + " particles";

    // Query-only probe: diffuse answers, mscp 0.3, below every useful gate.
    fixtures << answer_fixture(lcr::build_answer_prompt(query),
                               spread_answers(kAltAnswers[0], kAltAnswers[1], kAltAnswers[2],
                                              kAltAnswers[3], kAltAnswers[4]))
                    .dump()
             << "\n";

    // Every (query, document) pair gets a batch so any retrieval outcome is
    // covered. Confidence tracks the judgment: relevant docs collapse to one
    // cluster, the judged distractor lands medium, everything else low.
    for (const lcr::Document& doc : all_docs) {
      const bool own_group = doc.doc_id.substr(1, 2) == query.query_id.substr(1);
      std::vector<std::string> answers;
      if (own_group && grade_by_doc[doc.doc_id] > 0) {
        answers.assign(10, relevant_answer);
      } else if (own_group && grade_by_doc[doc.doc_id] == 0) {
        answers = medium_answers(kAltAnswers[0], kAltAnswers[1], kAltAnswers[2]);
      } else {
        answers = spread_answers(kAltAnswers[0], kAltAnswers[1], kAltAnswers[2], kAltAnswers[3],
                                 kAltAnswers[4]);
      }
      fixtures << answer_fixture(lcr::build_answer_prompt(query, &doc), answers).dump() << "\n";
    }

    // Entailment oracle: the alternative answers never entail each other.
    for (const std::string& a : kAltAnswers) {
      for (const std::string& b : kAltAnswers) {
        if (a == b) {
          continue;
        }
        fixtures << json{{"prompt", lcr::build_entailment_prompt(query, a, b)},
                         {"role", "entailment"},
                         {"label", "neutral"}}
                        .dump()
                 << "\n";
      }
    }
  }

  std::ofstream config(fs::path(out_dir) / "config.json");
  config << json{{"dataset",
                  {{"corpus", "corpus.jsonl"},
                   {"queries", "queries.jsonl"},
                   {"qrels", "qrels.tsv"},
                   {"qrels_format", "beir_tsv"}}},
                 {"backend",
                  {{"kind", "scripted"},
                   {"model", "desk-oracle"},
                   {"fixtures", "fixtures.jsonl"},
                   {"in_flight_limit", 1}}},
                 {"lcr",
                  {{"t_query", 0.7},
                   {"t_upper", 0.9},
                   {"t_lower", 0.4},
                   {"k_samples", 10},
                   {"temperature", 1.0},
                   {"query_threshold_enabled", true}}},
                 {"bm25", {{"k1", 0.9}, {"b", 0.4}}},
                 {"retrieve_k", 10},
                 {"eval_k", 5},
                 {"output_dir", "out"},
                 {"cache", "out/lcr_cache.jsonl"},
                 {"index", "out/index.bin"}}
                    .dump(2)
             << "\n";

  std::cout << "wrote desk benchmark (" << all_docs.size() << " docs, " << all_queries.size()
            << " queries) to " << out_dir << "\n";
  return 0;
}
