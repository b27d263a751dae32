// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include "lcr/cache.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "lcr/error.hpp"

namespace lcr {

CacheStore::CacheStore(std::string path) : path_(std::move(path)) {
  if (!path_.empty()) {
    load();
  }
}

void CacheStore::load() {
  std::ifstream in(path_);
  if (!in.is_open()) {
    return;  // nothing cached yet
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object() || !record.contains("key") ||
        !record.contains("role") || !record.contains("payload")) {
      std::cerr << "lcr: warning: skipping corrupt cache record at " << path_ << ":" << line_no
                << "\n";
      ++corrupt_lines_;
      continue;
    }
    records_.insert_or_assign(record.at("key").get<std::string>(),
                              Record{record.at("role").get<std::string>(),
                                     record.at("payload")});
  }
}

std::optional<nlohmann::json> CacheStore::get(const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find(key);
  if (it == records_.end()) {
    return std::nullopt;
  }
  return it->second.payload;
}

void CacheStore::put(const std::string& key, const std::string& role, nlohmann::json payload) {
  std::unique_lock lock(mutex_);
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app);
    if (!out.is_open()) {
      throw_error(ErrorCode::io_error, "cannot append to cache file '" + path_ + "'");
    }
    nlohmann::json record{{"key", key}, {"role", role}, {"payload", payload}};
    out << record.dump() << "\n";
  }
  records_.insert_or_assign(key, Record{role, std::move(payload)});
}

std::vector<std::pair<std::string, nlohmann::json>> CacheStore::scan_role(
    const std::string& role) const {
  std::shared_lock lock(mutex_);
  std::vector<std::pair<std::string, nlohmann::json>> out;
  for (const auto& [key, record] : records_) {
    if (record.role == role) {
      out.emplace_back(key, record.payload);
    }
  }
  lock.unlock();
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::vector<std::pair<std::string, nlohmann::json>> CacheStore::scan_prefix(
    const std::string& key_prefix) const {
  std::shared_lock lock(mutex_);
  std::vector<std::pair<std::string, nlohmann::json>> out;
  for (const auto& [key, record] : records_) {
    if (key.rfind(key_prefix, 0) == 0) {
      out.emplace_back(key, record.payload);
    }
  }
  lock.unlock();
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::size_t CacheStore::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

}  // namespace lcr
