// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lcr/cache.hpp"
#include "lcr/prompts.hpp"
#include "lcr/types.hpp"

namespace lcr {

enum class BackendKind { remote, scripted };

struct BackendId {
  std::string name;
  BackendKind kind = BackendKind::scripted;
};

enum class EntailmentLabel { entailment, contradiction, neutral };

const char* entailment_label_name(EntailmentLabel label);

/// Maps an arbitrary model response to a label: the first whole-word
/// occurrence of "entailment", "contradiction" or "neutral" (case-insensitive)
/// wins; anything else falls back to neutral. Total by construction.
/// `recognized`, when given, reports whether a keyword was actually found.
EntailmentLabel parse_entailment_label(std::string_view response, bool* recognized = nullptr);

/// K generations for one prompt, in the order they were produced.
struct SampleBatch {
  std::string prompt;
  double temperature = 1.0;
  std::vector<std::string> answers;
};

/// Black-box generation interface. Implementations must either return exactly
/// n generations or throw; partial batches are not allowed.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual const BackendId& id() const = 0;
  virtual std::vector<std::string> generate(const std::string& prompt, int n,
                                            double temperature) = 0;
};

/// Extracts choices[*].message.content from a chat-completion response body.
std::vector<std::string> parse_chat_completion(const std::string& body);

/// Deterministic fixture-driven backend. Fixtures are line-delimited JSON
/// records carrying either a literal "prompt" or a sha-256 "prompt_hash",
/// a "role" ("answer" or "entailment"), and "answers" or "label".
class ScriptedBackend : public LlmBackend {
 public:
  explicit ScriptedBackend(std::string name);
  static std::shared_ptr<ScriptedBackend> from_file(const std::string& path,
                                                    std::string name = "scripted");

  void add_answers(const std::string& prompt, std::vector<std::string> answers);
  void add_label(const std::string& prompt, EntailmentLabel label);

  const BackendId& id() const override { return id_; }
  std::vector<std::string> generate(const std::string& prompt, int n,
                                    double temperature) override;

 private:
  BackendId id_;
  std::unordered_map<std::string, std::vector<std::string>> answers_by_hash_;
  std::unordered_map<std::string, std::string> label_by_hash_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{1000};  // doubled after each failure
};

struct RemoteSettings {
  std::string endpoint;  // e.g. http://host:8000/v1/chat/completions
  std::string api_key;
  std::string model;
  int in_flight_limit = 8;
  RetryPolicy retry;
};

/// Chat-completion client. Requests all n samples in one call via the "n"
/// field and falls back to sequential single-sample calls when the endpoint
/// returns fewer choices. Transport failures and 5xx responses are retried
/// with exponential backoff; 4xx responses fail immediately.
class RemoteBackend : public LlmBackend {
 public:
  explicit RemoteBackend(RemoteSettings settings);
  ~RemoteBackend() override;

  const BackendId& id() const override { return id_; }
  std::vector<std::string> generate(const std::string& prompt, int n,
                                    double temperature) override;

 private:
  std::string post_once(const std::string& body) const;

  BackendId id_;
  RemoteSettings settings_;
  std::unique_ptr<class RequestGate> gate_;
};

/// Binds a backend to the persistent sample cache and exposes the two
/// operations the reranker needs. The cache is consulted per sample index,
/// so repeated calls never re-issue requests for material already fetched.
class LlmService {
 public:
  LlmService(std::shared_ptr<LlmBackend> backend, std::shared_ptr<CacheStore> cache);

  SampleBatch sample_answers(const std::string& prompt, int k, double temperature);
  EntailmentLabel classify_entailment(const Query& query, std::string_view answer1,
                                      std::string_view answer2);

  LlmBackend& backend() { return *backend_; }
  CacheStore* cache() { return cache_.get(); }

  /// Responses that carried none of the three label keywords (mapped to neutral).
  std::uint64_t unparsed_label_count() const { return unparsed_labels_.load(); }

 private:
  std::shared_ptr<LlmBackend> backend_;
  std::shared_ptr<CacheStore> cache_;
  std::atomic<std::uint64_t> unparsed_labels_{0};
};

/// sha-256 hex digest of a prompt, the key form scripted fixtures may use.
std::string prompt_hash(const std::string& prompt);

/// Deterministic 64-hex cache digest of (prompt, temperature, sample index).
std::string cache_content_hash(const std::string& prompt, double temperature, int index);

/// Full store key: "<backend>:<role>:<content hash>".
std::string cache_key(const std::string& backend_name, const std::string& role,
                      const std::string& content_hash);

}  // namespace lcr
