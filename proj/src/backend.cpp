// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include "lcr/backend.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <semaphore>
#include <thread>

#ifdef LCR_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <json.hpp>

#include "sha256.hpp"

namespace lcr {

namespace {

using nlohmann::json;

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

/// First whole-word position of `needle` in lowercase `haystack`, or npos.
std::size_t find_word(const std::string& haystack, std::string_view needle) {
  std::size_t pos = haystack.find(needle);
  while (pos != std::string::npos) {
    bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
    std::size_t end = pos + needle.size();
    bool right_ok = end >= haystack.size() || !is_word_char(haystack[end]);
    if (left_ok && right_ok) {
      return pos;
    }
    pos = haystack.find(needle, pos + 1);
  }
  return std::string::npos;
}

std::string excerpt(const std::string& body, std::size_t max_len = 200) {
  if (body.size() <= max_len) {
    return body;
  }
  return body.substr(0, max_len) + "...";
}

}  // namespace

const char* entailment_label_name(EntailmentLabel label) {
  switch (label) {
    case EntailmentLabel::entailment: return "entailment";
    case EntailmentLabel::contradiction: return "contradiction";
    case EntailmentLabel::neutral: return "neutral";
  }
  return "neutral";
}

EntailmentLabel parse_entailment_label(std::string_view response, bool* recognized) {
  std::string lowered(response);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

  struct Candidate {
    std::string_view word;
    EntailmentLabel label;
  };
  static constexpr Candidate kCandidates[] = {
      {"entailment", EntailmentLabel::entailment},
      {"contradiction", EntailmentLabel::contradiction},
      {"neutral", EntailmentLabel::neutral},
  };

  std::size_t best_pos = std::string::npos;
  EntailmentLabel best = EntailmentLabel::neutral;
  for (const auto& candidate : kCandidates) {
    std::size_t pos = find_word(lowered, candidate.word);
    if (pos < best_pos) {
      best_pos = pos;
      best = candidate.label;
    }
  }
  if (recognized != nullptr) {
    *recognized = best_pos != std::string::npos;
  }
  return best_pos == std::string::npos ? EntailmentLabel::neutral : best;
}

std::vector<std::string> parse_chat_completion(const std::string& body) {
  json payload = json::parse(body, nullptr, false);
  if (payload.is_discarded() || !payload.is_object()) {
    throw_error(ErrorCode::remote_error, "response body is not a JSON object: " + excerpt(body));
  }
  if (!payload.contains("choices") || !payload.at("choices").is_array()) {
    throw_error(ErrorCode::remote_error, "response carries no choices array: " + excerpt(body));
  }
  std::vector<std::string> contents;
  for (const auto& choice : payload.at("choices")) {
    if (!choice.contains("message") || !choice.at("message").contains("content")) {
      throw_error(ErrorCode::remote_error, "choice lacks message.content: " + excerpt(body));
    }
    contents.push_back(choice.at("message").at("content").get<std::string>());
  }
  return contents;
}

// ---------------------------------------------------------------------------
// ScriptedBackend

ScriptedBackend::ScriptedBackend(std::string name)
    : id_{std::move(name), BackendKind::scripted} {}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path,
                                                            std::string name) {
  std::ifstream in(path);
  if (!in.is_open()) {
    throw_error(ErrorCode::io_error, "cannot open fixture file '" + path + "'");
  }
  auto backend = std::make_shared<ScriptedBackend>(std::move(name));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      throw_error(ErrorCode::corrupt_record,
                  "unreadable fixture at " + path + ":" + std::to_string(line_no));
    }
    std::string hash;
    if (record.contains("prompt")) {
      hash = sha256_hex(record.at("prompt").get<std::string>());
    } else if (record.contains("prompt_hash")) {
      hash = record.at("prompt_hash").get<std::string>();
    } else {
      throw_error(ErrorCode::corrupt_record,
                  "fixture without prompt or prompt_hash at " + path + ":" +
                      std::to_string(line_no));
    }
    const std::string role = record.value("role", "answer");
    if (role == "answer") {
      backend->answers_by_hash_[hash] = record.at("answers").get<std::vector<std::string>>();
    } else if (role == "entailment") {
      backend->label_by_hash_[hash] = record.at("label").get<std::string>();
    } else {
      throw_error(ErrorCode::corrupt_record,
                  "unknown fixture role '" + role + "' at " + path + ":" +
                      std::to_string(line_no));
    }
  }
  return backend;
}

void ScriptedBackend::add_answers(const std::string& prompt, std::vector<std::string> answers) {
  answers_by_hash_[sha256_hex(prompt)] = std::move(answers);
}

void ScriptedBackend::add_label(const std::string& prompt, EntailmentLabel label) {
  label_by_hash_[sha256_hex(prompt)] = entailment_label_name(label);
}

std::vector<std::string> ScriptedBackend::generate(const std::string& prompt, int n,
                                                   double /*temperature*/) {
  const std::string hash = sha256_hex(prompt);
  if (auto it = answers_by_hash_.find(hash); it != answers_by_hash_.end()) {
    if (static_cast<int>(it->second.size()) < n) {
      throw_error(ErrorCode::script_miss,
                  "fixture " + hash + " holds " + std::to_string(it->second.size()) +
                      " answers, " + std::to_string(n) + " requested");
    }
    return {it->second.begin(), it->second.begin() + n};
  }
  if (auto it = label_by_hash_.find(hash); it != label_by_hash_.end()) {
    return std::vector<std::string>(static_cast<std::size_t>(n), it->second);
  }
  throw_error(ErrorCode::script_miss, "no fixture for prompt hash " + hash);
}

// ---------------------------------------------------------------------------
// RemoteBackend

/// Counting semaphore bounding concurrent remote calls.
class RequestGate {
 public:
  explicit RequestGate(int limit) : sem_(std::max(1, limit)) {}
  void acquire() { sem_.acquire(); }
  void release() { sem_.release(); }

 private:
  std::counting_semaphore<> sem_;
};

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // leading slash, defaults to "/"
};

ParsedUrl split_url(const std::string& url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw_error(ErrorCode::invalid_config, "endpoint '" + url + "' lacks a scheme");
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

RemoteBackend::~RemoteBackend() = default;

RemoteBackend::RemoteBackend(RemoteSettings settings)
    : id_{settings.model, BackendKind::remote},
      settings_(std::move(settings)),
      gate_(std::make_unique<RequestGate>(settings_.in_flight_limit)) {
  if (settings_.endpoint.empty()) {
    throw_error(ErrorCode::invalid_config, "remote backend requires an endpoint URL");
  }
  if (settings_.model.empty()) {
    throw_error(ErrorCode::invalid_config, "remote backend requires a model name");
  }
}

std::string RemoteBackend::post_once(const std::string& body) const {
  const ParsedUrl url = split_url(settings_.endpoint);
  int last_status = 0;
  std::string last_detail;
  for (int attempt = 1; attempt <= settings_.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      auto delay = settings_.retry.base_delay * (1LL << (attempt - 2));
      std::this_thread::sleep_for(delay);
    }

    httplib::Client client(url.base);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (!settings_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + settings_.api_key);
    }
    gate_->acquire();
    httplib::Result result = client.Post(url.path, headers, body, "application/json");
    gate_->release();

    if (!result) {
      last_status = 0;
      last_detail = httplib::to_string(result.error());
      continue;  // transport error: retry
    }
    if (result->status >= 200 && result->status < 300) {
      return result->body;
    }
    last_status = result->status;
    last_detail = excerpt(result->body);
    if (result->status >= 400 && result->status < 500) {
      break;  // client errors are not retryable
    }
  }
  throw_error(ErrorCode::remote_error,
              "endpoint " + settings_.endpoint + " failed with status " +
                  std::to_string(last_status) + ": " + last_detail);
}

std::vector<std::string> RemoteBackend::generate(const std::string& prompt, int n,
                                                 double temperature) {
  auto request_body = [&](int count) {
    json body{{"model", settings_.model},
              {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
              {"temperature", temperature},
              {"n", count}};
    return body.dump();
  };

  std::vector<std::string> answers = parse_chat_completion(post_once(request_body(n)));
  if (answers.empty()) {
    throw_error(ErrorCode::remote_error, "endpoint returned an empty choices array");
  }
  if (static_cast<int>(answers.size()) > n) {
    answers.resize(static_cast<std::size_t>(n));
  }
  // Endpoints that ignore "n" get the remainder one sample at a time.
  while (static_cast<int>(answers.size()) < n) {
    std::vector<std::string> extra = parse_chat_completion(post_once(request_body(1)));
    if (extra.empty()) {
      throw_error(ErrorCode::remote_error, "endpoint returned an empty choices array");
    }
    answers.push_back(std::move(extra.front()));
  }
  return answers;
}

// ---------------------------------------------------------------------------
// LlmService

LlmService::LlmService(std::shared_ptr<LlmBackend> backend, std::shared_ptr<CacheStore> cache)
    : backend_(std::move(backend)), cache_(std::move(cache)) {}

std::string prompt_hash(const std::string& prompt) { return sha256_hex(prompt); }

std::string cache_content_hash(const std::string& prompt, double temperature, int index) {
  return sha256_hex(json::array({prompt, temperature, index}).dump());
}

std::string cache_key(const std::string& backend_name, const std::string& role,
                      const std::string& content_hash) {
  return backend_name + ":" + role + ":" + content_hash;
}

SampleBatch LlmService::sample_answers(const std::string& prompt, int k, double temperature) {
  if (k < 1) {
    throw_error(ErrorCode::empty_input, "sample count must be >= 1");
  }
  std::vector<std::string> answers(static_cast<std::size_t>(k));
  std::vector<int> missing;
  for (int i = 0; i < k; ++i) {
    const std::string key =
        cache_key(backend_->id().name, "answer", cache_content_hash(prompt, temperature, i));
    if (cache_ != nullptr) {
      if (auto hit = cache_->get(key)) {
        answers[static_cast<std::size_t>(i)] = hit->get<std::string>();
        continue;
      }
    }
    missing.push_back(i);
  }

  if (!missing.empty()) {
    std::vector<std::string> fresh =
        backend_->generate(prompt, static_cast<int>(missing.size()), temperature);
    for (std::size_t slot = 0; slot < missing.size(); ++slot) {
      const int index = missing[slot];
      std::string answer = trim(fresh[slot]);
      if (cache_ != nullptr) {
        cache_->put(
            cache_key(backend_->id().name, "answer", cache_content_hash(prompt, temperature, index)),
            "answer", answer);
      }
      answers[static_cast<std::size_t>(index)] = std::move(answer);
    }
  }
  return SampleBatch{prompt, temperature, std::move(answers)};
}

EntailmentLabel LlmService::classify_entailment(const Query& query, std::string_view answer1,
                                                std::string_view answer2) {
  const std::string prompt = build_entailment_prompt(query, answer1, answer2);
  const std::string key =
      cache_key(backend_->id().name, "entailment", cache_content_hash(prompt, 0.0, 0));
  if (cache_ != nullptr) {
    if (auto hit = cache_->get(key)) {
      return parse_entailment_label(hit->get<std::string>());
    }
  }
  // Classification is greedy (temperature 0, single sample) so the partition
  // is reproducible run to run.
  std::vector<std::string> response = backend_->generate(prompt, 1, 0.0);
  bool recognized = false;
  EntailmentLabel label = parse_entailment_label(response.front(), &recognized);
  if (!recognized) {
    unparsed_labels_.fetch_add(1);
  }
  if (cache_ != nullptr) {
    cache_->put(key, "entailment", entailment_label_name(label));
  }
  return label;
}

}  // namespace lcr
