// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace lcr {

/// Append-only persistent key/value store backed by a line-delimited JSON
/// file. Each line is {"key": ..., "role": ..., "payload": ...}. Unreadable
/// lines (e.g. a torn final write) are skipped with a warning at load time.
/// Readers may run concurrently; appends are serialized.
class CacheStore {
 public:
  /// Opens or creates the store at `path`. Pass an empty path for a purely
  /// in-memory store (nothing persisted).
  explicit CacheStore(std::string path);

  std::optional<nlohmann::json> get(const std::string& key) const;
  void put(const std::string& key, const std::string& role, nlohmann::json payload);

  /// All records whose role matches, as (key, payload) pairs in key order.
  std::vector<std::pair<std::string, nlohmann::json>> scan_role(const std::string& role) const;

  /// All records whose key starts with the prefix, in key order.
  std::vector<std::pair<std::string, nlohmann::json>> scan_prefix(
      const std::string& key_prefix) const;

  std::size_t size() const;
  std::size_t corrupt_lines_skipped() const { return corrupt_lines_; }
  const std::string& path() const { return path_; }

 private:
  struct Record {
    std::string role;
    nlohmann::json payload;
  };

  void load();

  std::string path_;
  std::unordered_map<std::string, Record> records_;
  std::size_t corrupt_lines_ = 0;
  mutable std::shared_mutex mutex_;
};

}  // namespace lcr
