// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "proactive/goal_weight_net.hpp"
#include "proactive/graph.hpp"
#include "proactive/rng.hpp"

namespace proactive {

using RankMap = std::map<TopicId, int>;

// Farthest topic gets rank 1, closest gets rank n. Among equal distances the
// smaller id gets the larger rank.
RankMap rank_descending_distance(std::span<const std::pair<TopicId, double>> distances);
// Least preferred gets rank 1, most preferred gets rank n; same tie rule.
RankMap rank_ascending_preference(std::span<const std::pair<TopicId, double>> preferences);

struct CandidateInput {
  TopicId topic;
  double est_distance = 0.0;    // ed(candidate, goal)
  double est_preference = 0.0;  // ep
};

struct CandidateScore {
  TopicId topic;
  double est_distance = 0.0;
  double est_preference = 0.0;
  int rank_d = 0;
  int rank_p = 0;
  double score = 0.0;
};

// score = gw * rank_d + (1 - gw) * rank_p, returned in input order.
std::vector<CandidateScore> score_candidates(std::span<const CandidateInput> candidates, double gw);

enum class PolicyType { kRandom, kPopGcr, kPopUs, kDegrade, kProi };

std::string_view policy_type_name(PolicyType t) noexcept;
PolicyType policy_type_from_name(std::string_view name);  // throws ConfigError

struct Policy {
  PolicyType type = PolicyType::kRandom;
  std::shared_ptr<const GoalWeightModel> model;  // Degrade and Proi only

  static Policy baseline(PolicyType type);
  static Policy learned(GoalWeightModel model);
  bool trainable() const noexcept { return type == PolicyType::kDegrade || type == PolicyType::kProi; }
  std::string_view name() const noexcept { return policy_type_name(type); }
};

// What the agent knows when it picks a topic.
struct DecisionState {
  StateInputs inputs;
  std::vector<CandidateInput> candidates;
};

struct Decision {
  TopicId topic;
  std::size_t index = 0;
  std::optional<double> gw;  // absent for Random
  FactorVector factors;
  std::vector<CandidateScore> scores;
  bool explored = false;
};

// Index of the highest score; equal scores go to the smaller topic id.
std::size_t argmax_score(std::span<const CandidateScore> scores);

// Picks a candidate. With probability epsilon (training only) a uniform
// random candidate overrides the policy's choice.
Decision select_topic(const Policy& policy, const DecisionState& state, Rng& rng,
                      double explore_epsilon = 0.0);

}  // namespace proactive
