// SPDX-License-Identifier: Apache-2.0
#include "proactive/distance.hpp"

#include <algorithm>
#include <limits>
#include <mutex>

#include "proactive/errors.hpp"

namespace proactive {

void DistanceConfig::validate() const {
  if (limit <= 0) throw ConfigError("distance_limit must be positive");
  if (limit % 2 != 0) throw ConfigError("distance_limit must be even");
  if (!(d_max > limit)) throw ConfigError("d_max must exceed distance_limit");
}

std::shared_ptr<const DistanceCache::Ball> DistanceCache::find_ball(TopicId center) const {
  std::shared_lock lock(mutex_);
  auto it = balls_.find(center);
  return it == balls_.end() ? nullptr : it->second;
}

std::shared_ptr<const DistanceCache::Ball> DistanceCache::store_ball(TopicId center, Ball ball) {
  auto ptr = std::make_shared<const Ball>(std::move(ball));
  std::unique_lock lock(mutex_);
  balls_[center] = ptr;
  return ptr;
}

std::uint64_t DistanceCache::key(TopicId i, TopicId j) noexcept {
  if (j < i) std::swap(i, j);
  return (std::uint64_t{i.value} << 32) | j.value;
}

bool DistanceCache::find_pair(TopicId i, TopicId j, double& out) const {
  std::shared_lock lock(mutex_);
  auto it = pairs_.find(key(i, j));
  if (it == pairs_.end()) return false;
  out = it->second;
  return true;
}

void DistanceCache::store_pair(TopicId i, TopicId j, double value) {
  std::unique_lock lock(mutex_);
  pairs_[key(i, j)] = value;
}

std::size_t DistanceCache::pair_count() const {
  std::shared_lock lock(mutex_);
  return pairs_.size();
}

namespace {

DistanceCache::Ball make_ball(const KnowledgeGraph& graph, TopicId center, int radius) {
  auto ball = khop_ball(graph, center, radius);
  return {ball.begin(), ball.end()};
}

std::shared_ptr<const DistanceCache::Ball> ball_for(const KnowledgeGraph& graph, TopicId center,
                                                    int radius, DistanceCache* cache) {
  if (cache) {
    if (auto hit = cache->find_ball(center)) return hit;
    return cache->store_ball(center, make_ball(graph, center, radius));
  }
  return std::make_shared<const DistanceCache::Ball>(make_ball(graph, center, radius));
}

}  // namespace

double estimate_distance(const KnowledgeGraph& graph, TopicId i, TopicId j,
                         const DistanceConfig& cfg, DistanceCache* cache) {
  if (!graph.contains(i)) throw LookupError("unknown topic id " + std::to_string(i.value));
  if (!graph.contains(j)) throw LookupError("unknown topic id " + std::to_string(j.value));
  if (i == j) return 0.0;
  double memo = 0.0;
  if (cache && cache->find_pair(i, j, memo)) return memo;

  const auto bi = ball_for(graph, i, cfg.radius(), cache);
  const auto bj = ball_for(graph, j, cfg.radius(), cache);
  // Both balls are sorted by id: merge-walk the overlap.
  int best = std::numeric_limits<int>::max();
  auto a = bi->begin();
  auto b = bj->begin();
  while (a != bi->end() && b != bj->end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      best = std::min(best, a->second + b->second);
      ++a;
      ++b;
    }
  }
  const double result = best == std::numeric_limits<int>::max() ? cfg.d_max : double(best);
  if (cache) cache->store_pair(i, j, result);
  return result;
}

DistanceEstimator::DistanceEstimator(const KnowledgeGraph& graph, DistanceConfig cfg)
    : graph_(&graph), cfg_(cfg) {
  cfg_.validate();
}

double DistanceEstimator::estimate(TopicId i, TopicId j) const {
  return estimate_distance(*graph_, i, j, cfg_, &cache_);
}

}  // namespace proactive
