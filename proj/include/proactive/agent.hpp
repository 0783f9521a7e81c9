// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "proactive/dialogue.hpp"
#include "proactive/distance.hpp"
#include "proactive/embeddings.hpp"
#include "proactive/graph.hpp"
#include "proactive/policy.hpp"
#include "proactive/preference.hpp"

namespace proactive {

struct AgentConfig {
  int max_turns = 20;  // T
  DistanceConfig distance;
  RidgeOptions ridge;

  void validate() const;
};

// The immutable world an agent talks over, plus the shared distance cache.
class TopicWorld {
 public:
  TopicWorld(const KnowledgeGraph& graph, const EmbeddingTable& embeddings, AgentConfig cfg);

  const KnowledgeGraph& graph() const noexcept { return *graph_; }
  const EmbeddingTable& embeddings() const noexcept { return *embeddings_; }
  const AgentConfig& config() const noexcept { return cfg_; }
  const DistanceEstimator& distance() const noexcept { return distance_; }

 private:
  const KnowledgeGraph* graph_;
  const EmbeddingTable* embeddings_;
  AgentConfig cfg_;
  DistanceEstimator distance_;
};

// Everything the agent derives from the history before choosing.
struct AgentView {
  DecisionState state;
  std::vector<TopicId> anchors;
  double gcd = 0.0;  // min over anchors of ed(anchor, goal)
  double eus = 0.5;
  ObservationSet observations;
};

ObservationSet observations_from(const DialogueHistory& history);

// Average of the per-turn mean estimated preference of user-mentioned topics;
// 0.5 before the user has said anything.
double estimated_user_satisfaction(const DialogueHistory& history,
                                   const EstimatedPreferences& prefs);

// Goal-completion distance of the conversation's current position.
double current_goal_distance(const TopicWorld& world, std::span<const TopicId> anchors,
                             TopicId goal);

// Builds candidates (one hop of the anchors, minus topics the agent already
// introduced) and the four factor inputs for the next agent turn.
AgentView observe(const TopicWorld& world, const DialogueHistory& history);

}  // namespace proactive
