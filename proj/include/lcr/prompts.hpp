// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "lcr/types.hpp"

namespace lcr {

/// Strips leading/trailing ASCII whitespace.
std::string trim(std::string_view s);

/// Title and body joined by a single space; just the body when the title is empty.
std::string document_passage(const Document& doc);

/// Sampled answers are trimmed before use; an answer that is empty after the
/// trim is replaced by the literal token "EMPTY" so it can still be compared.
std::string normalize_answer(std::string_view answer);

/// Question-answering prompt, with the document passage as context when given.
std::string build_answer_prompt(const Query& query, const Document* document = nullptr);

/// NLI-style prompt asking whether answer1 semantically entails answer2.
/// Answers are normalized (see normalize_answer) before substitution.
std::string build_entailment_prompt(const Query& query, std::string_view answer1,
                                    std::string_view answer2);

}  // namespace lcr
