// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace lcr {

enum class ErrorCode {
  duplicate_doc,
  duplicate_query,
  non_finite_score,
  rank_gap,
  empty_query,
  empty_input,
  remote_error,
  script_miss,
  missing_document,
  missing_query,
  invalid_thresholds,
  invalid_config,
  malformed_run_line,
  non_contiguous_ranks,
  empty_corpus,
  malformed_record,
  empty_intersection,
  missing_confidence_cache,
  already_exists,
  corrupt_record,
  io_error,
};

const char* error_code_name(ErrorCode code);

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace lcr
