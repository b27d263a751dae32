// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include "lcr/prompts.hpp"

#include <cctype>

namespace lcr {

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

std::string document_passage(const Document& doc) {
  if (doc.title.empty()) {
    return doc.text;
  }
  return doc.title + " " + doc.text;
}

std::string normalize_answer(std::string_view answer) {
  std::string trimmed = trim(answer);
  if (trimmed.empty()) {
    return "EMPTY";
  }
  return trimmed;
}

std::string build_answer_prompt(const Query& query, const Document* document) {
  if (trim(query.text).empty()) {
    throw_error(ErrorCode::empty_query, "query '" + query.query_id + "' has no text");
  }
  std::string prompt = "Answer the following question as briefly as possible.\n";
  if (document != nullptr) {
    prompt += "Context: " + document_passage(*document) + "\n";
  }
  prompt += "Question: " + query.text + "\nAnswer:";
  return prompt;
}

std::string build_entailment_prompt(const Query& query, std::string_view answer1,
                                    std::string_view answer2) {
  std::string prompt = "We are evaluating answers to the question \"" + query.text + "\"\n";
  prompt += "Possible Answer 1: " + normalize_answer(answer1) + "\n";
  prompt += "Possible Answer 2: " + normalize_answer(answer2) + "\n";
  prompt +=
      "Does Possible Answer 1 semantically entail Possible Answer 2? Respond with only one of "
      "the following words: entailment, contradiction, or neutral. Do not provide any additional "
      "explanation.\nResponse:";
  return prompt;
}

}  // namespace lcr
