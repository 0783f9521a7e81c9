// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "proactive/graph.hpp"

namespace proactive {

struct DistanceConfig {
  int limit = 6;         // D; must be positive and even
  double d_max = 7.0;    // returned when the two balls are disjoint

  int radius() const noexcept { return limit / 2; }
  void validate() const;  // throws ConfigError
};

// Memoizes per-topic balls and symmetric pair estimates for one
// (graph, config). Safe for concurrent readers and idempotent writers.
class DistanceCache {
 public:
  using Ball = std::vector<std::pair<TopicId, int>>;  // sorted by id

  std::shared_ptr<const Ball> find_ball(TopicId center) const;
  std::shared_ptr<const Ball> store_ball(TopicId center, Ball ball);
  bool find_pair(TopicId i, TopicId j, double& out) const;
  void store_pair(TopicId i, TopicId j, double value);
  std::size_t pair_count() const;

 private:
  static std::uint64_t key(TopicId i, TopicId j) noexcept;

  mutable std::shared_mutex mutex_;
  std::unordered_map<TopicId, std::shared_ptr<const Ball>> balls_;
  std::unordered_map<std::uint64_t, double> pairs_;
};

// Soft distance: exact hop count when the radius-D/2 balls around i and j
// overlap (min over the overlap of d(i,k) + d(j,k)), d_max otherwise.
double estimate_distance(const KnowledgeGraph& graph, TopicId i, TopicId j,
                         const DistanceConfig& cfg, DistanceCache* cache = nullptr);

// Bundles a graph, config and cache for callers that estimate repeatedly.
class DistanceEstimator {
 public:
  DistanceEstimator(const KnowledgeGraph& graph, DistanceConfig cfg);

  double estimate(TopicId i, TopicId j) const;
  // gcd_t = ed(current, goal)
  double goal_difficulty(TopicId current, TopicId goal) const { return estimate(current, goal); }
  const DistanceConfig& config() const noexcept { return cfg_; }
  const KnowledgeGraph& graph() const noexcept { return *graph_; }

 private:
  const KnowledgeGraph* graph_;
  DistanceConfig cfg_;
  mutable DistanceCache cache_;
};

}  // namespace proactive
