// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include "lcr/error.hpp"

namespace lcr {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::duplicate_doc: return "DuplicateDoc";
    case ErrorCode::duplicate_query: return "DuplicateQuery";
    case ErrorCode::non_finite_score: return "NonFiniteScore";
    case ErrorCode::rank_gap: return "RankGap";
    case ErrorCode::empty_query: return "EmptyQuery";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::remote_error: return "RemoteError";
    case ErrorCode::script_miss: return "ScriptMiss";
    case ErrorCode::missing_document: return "MissingDocument";
    case ErrorCode::missing_query: return "MissingQuery";
    case ErrorCode::invalid_thresholds: return "InvalidThresholds";
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::malformed_run_line: return "MalformedRunLine";
    case ErrorCode::non_contiguous_ranks: return "NonContiguousRanks";
    case ErrorCode::empty_corpus: return "EmptyCorpus";
    case ErrorCode::malformed_record: return "MalformedRecord";
    case ErrorCode::empty_intersection: return "EmptyIntersection";
    case ErrorCode::missing_confidence_cache: return "MissingConfidenceCache";
    case ErrorCode::already_exists: return "AlreadyExists";
    case ErrorCode::corrupt_record: return "CorruptRecord";
    case ErrorCode::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace lcr
