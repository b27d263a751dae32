// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include "lcr/data.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lcr/prompts.hpp"

namespace lcr {

using nlohmann::json;

namespace {

json parse_record(const std::string& line, const std::string& path, std::size_t line_no) {
  json record = json::parse(line, nullptr, false);
  if (record.is_discarded() || !record.is_object()) {
    throw_error(ErrorCode::malformed_record,
                path + ":" + std::to_string(line_no) + " is not a JSON object");
  }
  return record;
}

std::string require_string(const json& record, const char* field, const std::string& path,
                           std::size_t line_no) {
  if (!record.contains(field) || !record.at(field).is_string()) {
    throw_error(ErrorCode::malformed_record,
                path + ":" + std::to_string(line_no) + " lacks string field '" + field + "'");
  }
  return record.at(field).get<std::string>();
}

int parse_grade(const std::string& text, const std::string& path, std::size_t line_no) {
  int grade = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), grade);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw_error(ErrorCode::malformed_record,
                path + ":" + std::to_string(line_no) + " has non-integer grade '" + text + "'");
  }
  if (grade < 0) {
    throw_error(ErrorCode::malformed_record,
                path + ":" + std::to_string(line_no) + " has negative grade " + text);
  }
  return grade;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace

CorpusMap load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) {
    throw_error(ErrorCode::io_error, "cannot open corpus file '" + path + "'");
  }
  CorpusMap corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    json record = parse_record(line, path, line_no);
    Document doc;
    doc.doc_id = require_string(record, "_id", path, line_no);
    doc.text = require_string(record, "text", path, line_no);
    doc.title = record.contains("title") && record.at("title").is_string()
                    ? record.at("title").get<std::string>()
                    : "";
    if (doc.doc_id.empty()) {
      throw_error(ErrorCode::malformed_record,
                  path + ":" + std::to_string(line_no) + " has an empty _id");
    }
    if (trim(doc.text).empty()) {
      throw_error(ErrorCode::malformed_record,
                  path + ":" + std::to_string(line_no) + " has empty text");
    }
    if (!corpus.emplace(doc.doc_id, doc).second) {
      throw_error(ErrorCode::duplicate_doc, "doc_id '" + doc.doc_id + "' appears twice in " + path);
    }
  }
  if (corpus.empty()) {
    throw_error(ErrorCode::empty_corpus, "corpus file '" + path + "' contains no records");
  }
  return corpus;
}

QueryMap load_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) {
    throw_error(ErrorCode::io_error, "cannot open queries file '" + path + "'");
  }
  QueryMap queries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    json record = parse_record(line, path, line_no);
    Query query;
    query.query_id = require_string(record, "_id", path, line_no);
    query.text = require_string(record, "text", path, line_no);
    if (query.query_id.empty()) {
      throw_error(ErrorCode::malformed_record,
                  path + ":" + std::to_string(line_no) + " has an empty _id");
    }
    if (trim(query.text).empty()) {
      throw_error(ErrorCode::malformed_record,
                  path + ":" + std::to_string(line_no) + " has empty text");
    }
    if (!queries.emplace(query.query_id, query).second) {
      throw_error(ErrorCode::duplicate_query,
                  "query_id '" + query.query_id + "' appears twice in " + path);
    }
  }
  if (queries.empty()) {
    throw_error(ErrorCode::empty_corpus, "queries file '" + path + "' contains no records");
  }
  return queries;
}

std::vector<RelevanceJudgment> load_qrels(const std::string& path, QrelsFormat format) {
  std::ifstream in(path);
  if (!in.is_open()) {
    throw_error(ErrorCode::io_error, "cannot open qrels file '" + path + "'");
  }
  std::vector<RelevanceJudgment> judgments;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (trim(line).empty()) {
      continue;
    }
    RelevanceJudgment judgment;
    if (format == QrelsFormat::beir_tsv) {
      std::vector<std::string> fields = split_tabs(line);
      if (fields.size() != 3) {
        throw_error(ErrorCode::malformed_record,
                    path + ":" + std::to_string(line_no) + " does not have 3 tab-separated fields");
      }
      // BEIR distributions start with a "query-id corpus-id score" header.
      if (line_no == 1 && fields[2] == "score") {
        continue;
      }
      judgment.query_id = fields[0];
      judgment.doc_id = fields[1];
      judgment.grade = parse_grade(fields[2], path, line_no);
    } else {
      std::istringstream fields(line);
      std::string qid, ignored, doc_id, grade_text, extra;
      if (!(fields >> qid >> ignored >> doc_id >> grade_text) || (fields >> extra)) {
        throw_error(ErrorCode::malformed_record,
                    path + ":" + std::to_string(line_no) + " does not have 4 columns");
      }
      judgment.query_id = qid;
      judgment.doc_id = doc_id;
      judgment.grade = parse_grade(grade_text, path, line_no);
    }
    if (!seen.emplace(judgment.query_id, judgment.doc_id).second) {
      throw_error(ErrorCode::malformed_record,
                  path + ":" + std::to_string(line_no) + " repeats pair (" + judgment.query_id +
                      ", " + judgment.doc_id + ")");
    }
    judgments.push_back(std::move(judgment));
  }
  return judgments;
}

DatasetBundle load_dataset(const std::string& corpus_path, const std::string& queries_path,
                           const std::string& qrels_path, QrelsFormat format) {
  DatasetBundle bundle;
  bundle.corpus = load_corpus(corpus_path);
  bundle.queries = load_queries(queries_path);

  std::vector<RelevanceJudgment> raw = load_qrels(qrels_path, format);
  bundle.qrels.reserve(raw.size());
  std::size_t dropped = 0;
  std::size_t unknown_docs = 0;
  for (auto& judgment : raw) {
    if (bundle.queries.find(judgment.query_id) == bundle.queries.end()) {
      ++dropped;
      continue;
    }
    if (bundle.corpus.find(judgment.doc_id) == bundle.corpus.end()) {
      ++unknown_docs;
    }
    bundle.qrels.push_back(std::move(judgment));
  }
  if (dropped > 0) {
    std::cerr << "lcr: warning: dropped " << dropped
              << " judgment(s) referencing queries absent from " << queries_path << "\n";
  }
  if (unknown_docs > 0) {
    std::cerr << "lcr: warning: " << unknown_docs << " judgment(s) reference documents absent from "
              << corpus_path << "\n";
  }
  return bundle;
}

namespace {

std::string format_score(double score) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", score);
  return buffer;
}

}  // namespace

void write_run(const std::vector<RerankOutcome>& outcomes, const std::string& tag,
               const std::string& path) {
  if (outcomes.empty()) {
    throw_error(ErrorCode::empty_input, "refusing to write an empty run to '" + path + "'");
  }
  std::vector<const RerankOutcome*> ordered;
  ordered.reserve(outcomes.size());
  for (const auto& outcome : outcomes) {
    ordered.push_back(&outcome);
  }
  std::sort(ordered.begin(), ordered.end(), [](const RerankOutcome* a, const RerankOutcome* b) {
    return a->query_id < b->query_id;
  });

  std::ofstream out(path);
  if (!out.is_open()) {
    throw_error(ErrorCode::io_error, "cannot write run file '" + path + "'");
  }
  for (const RerankOutcome* outcome : ordered) {
    const int n = static_cast<int>(outcome->entries.size());
    for (const auto& entry : outcome->entries) {
      const double score = outcome->gated
                               ? entry.prev_score
                               : static_cast<double>(n - entry.new_rank + 1);
      out << outcome->query_id << " Q0 " << entry.doc_id << " " << entry.new_rank << " "
          << format_score(score) << " " << tag << "\n";
    }
  }
  if (!out.good()) {
    throw_error(ErrorCode::io_error, "short write to run file '" + path + "'");
  }
}

void write_run(const std::map<std::string, ScoredList>& run, const std::string& tag,
               const std::string& path) {
  if (run.empty()) {
    throw_error(ErrorCode::empty_input, "refusing to write an empty run to '" + path + "'");
  }
  std::ofstream out(path);
  if (!out.is_open()) {
    throw_error(ErrorCode::io_error, "cannot write run file '" + path + "'");
  }
  for (const auto& [query_id, list] : run) {
    for (const auto& entry : list.entries) {
      out << query_id << " Q0 " << entry.doc_id << " " << entry.original_rank << " "
          << format_score(entry.prev_score) << " " << tag << "\n";
    }
  }
  if (!out.good()) {
    throw_error(ErrorCode::io_error, "short write to run file '" + path + "'");
  }
}

void write_diagnostics(const std::vector<RerankOutcome>& outcomes,
                       const std::string& config_hash, const std::string& path) {
  std::ofstream out(path);
  if (!out.is_open()) {
    throw_error(ErrorCode::io_error, "cannot write diagnostics file '" + path + "'");
  }
  out << json{{"config", config_hash}}.dump() << "\n";
  std::vector<const RerankOutcome*> ordered;
  ordered.reserve(outcomes.size());
  for (const auto& outcome : outcomes) {
    ordered.push_back(&outcome);
  }
  std::sort(ordered.begin(), ordered.end(), [](const RerankOutcome* a, const RerankOutcome* b) {
    return a->query_id < b->query_id;
  });
  for (const RerankOutcome* outcome : ordered) {
    out << rerank_outcome_to_json(*outcome).dump() << "\n";
  }
  if (!out.good()) {
    throw_error(ErrorCode::io_error, "short write to diagnostics file '" + path + "'");
  }
}

}  // namespace lcr
