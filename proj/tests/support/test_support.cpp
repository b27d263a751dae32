// Copyright (c) 2026 the LCR authors
// SPDX-License-Identifier: Apache-2.0

#include "test_support.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace lcr_test {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  if (!out.good()) {
    throw std::runtime_error("failed to write " + path);
  }
}

std::pair<std::string, std::string> parse_entailment_args(const std::string& prompt) {
  const std::string marker1 = "Possible Answer 1: ";
  const std::string marker2 = "\nPossible Answer 2: ";
  const std::string tail = "\nDoes Possible Answer 1";
  const std::size_t p1 = prompt.find(marker1);
  const std::size_t p2 = prompt.find(marker2, p1);
  const std::size_t p3 = prompt.find(tail, p2);
  if (p1 == std::string::npos || p2 == std::string::npos || p3 == std::string::npos) {
    throw std::runtime_error("not an entailment prompt: " + prompt);
  }
  const std::size_t a_begin = p1 + marker1.size();
  const std::size_t b_begin = p2 + marker2.size();
  return {prompt.substr(a_begin, p2 - a_begin), prompt.substr(b_begin, p3 - b_begin)};
}

MiniScenario::MiniScenario() : backend(std::make_shared<MapOracleBackend>("mini-oracle")) {
  // Question alone: three semantic clusters sized {3, 1, 1}.
  backend->set_answers(lcr::build_answer_prompt(query),
                       {"Trump", "Trump", "Trump", "Biden", "Obama"});
  // With the helpful document every sample agrees.
  backend->set_answers(lcr::build_answer_prompt(query, &helpful),
                       {"Trump", "Trump", "Trump", "Trump", "Trump"});
  // With the misleading document the samples split {2, 2, 1}.
  backend->set_answers(lcr::build_answer_prompt(query, &misleading),
                       {"Trump", "Musk", "Trump", "Musk", "Biden"});
  // All distinct answers are mutually neutral (the map's default).
}

lcr::LcrConfig MiniScenario::config() const {
  lcr::LcrConfig config;
  config.t_query = 0.7;
  config.t_upper = 0.9;
  config.t_lower = 0.4;
  config.k_samples = 5;
  config.temperature = 1.0;
  config.query_threshold_enabled = true;
  return config;
}

std::vector<int> random_block_assignment(std::mt19937& rng, int k) {
  std::uniform_int_distribution<int> block(0, std::max(0, k - 1));
  std::vector<int> assignment(static_cast<std::size_t>(k));
  for (auto& value : assignment) {
    value = block(rng);
  }
  return assignment;
}

std::vector<std::vector<int>> canonical_partition(std::vector<std::vector<int>> clusters) {
  for (auto& cluster : clusters) {
    std::sort(cluster.begin(), cluster.end());
  }
  std::sort(clusters.begin(), clusters.end());
  return clusters;
}

std::vector<std::vector<int>> connected_components(const lcr::EntailmentFn& entails,
                                                   const std::vector<std::string>& answers) {
  const int k = static_cast<int>(answers.size());
  std::vector<int> parent(static_cast<std::size_t>(k));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      x = parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    }
    return x;
  };
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const bool edge =
          answers[static_cast<std::size_t>(i)] == answers[static_cast<std::size_t>(j)] ||
          (entails(answers[static_cast<std::size_t>(i)], answers[static_cast<std::size_t>(j)]) ==
               lcr::EntailmentLabel::entailment &&
           entails(answers[static_cast<std::size_t>(j)], answers[static_cast<std::size_t>(i)]) ==
               lcr::EntailmentLabel::entailment);
      if (edge) {
        parent[static_cast<std::size_t>(find(i))] = find(j);
      }
    }
  }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < k; ++i) {
    groups[find(i)].push_back(i);
  }
  std::vector<std::vector<int>> components;
  components.reserve(groups.size());
  for (auto& [_, members] : groups) {
    components.push_back(std::move(members));
  }
  return canonical_partition(std::move(components));
}

}  // namespace lcr_test
