// SPDX-License-Identifier: Apache-2.0
#include "proactive/agent.hpp"

#include <algorithm>
#include <limits>

#include "proactive/errors.hpp"

namespace proactive {

void AgentConfig::validate() const {
  if (max_turns < 1) throw ConfigError("max_turns must be >= 1");
  distance.validate();
  if (!(ridge.beta >= 0)) throw ConfigError("ridge_beta must be non-negative");
}

TopicWorld::TopicWorld(const KnowledgeGraph& graph, const EmbeddingTable& embeddings,
                       AgentConfig cfg)
    : graph_(&graph), embeddings_(&embeddings), cfg_(cfg), distance_(graph, cfg.distance) {
  cfg_.validate();
  if (embeddings.rows() != graph.topic_count())
    throw ConfigError("embedding table does not cover the graph");
}

ObservationSet observations_from(const DialogueHistory& history) {
  ObservationSet obs;
  for (const auto& turn : history.turns()) {
    if (!turn.response) continue;
    for (const auto& m : revealed_preferences(*turn.response)) obs.observe(m.topic, m.preference);
  }
  return obs;
}

double estimated_user_satisfaction(const DialogueHistory& history,
                                   const EstimatedPreferences& prefs) {
  double total = 0.0;
  int turns = 0;
  for (const auto& turn : history.turns()) {
    if (!turn.response) continue;
    const auto mentions = revealed_preferences(*turn.response);
    if (mentions.empty()) continue;
    double sum = 0.0;
    for (const auto& m : mentions) sum += prefs.at(m.topic);
    total += sum / static_cast<double>(mentions.size());
    ++turns;
  }
  return turns == 0 ? kColdStartPreference : total / turns;
}

double current_goal_distance(const TopicWorld& world, std::span<const TopicId> anchors,
                             TopicId goal) {
  double best = std::numeric_limits<double>::infinity();
  for (TopicId a : anchors) best = std::min(best, world.distance().goal_difficulty(a, goal));
  return best;
}

AgentView observe(const TopicWorld& world, const DialogueHistory& history) {
  AgentView view;
  view.anchors = history.anchors();
  const auto introduced = history.agent_topics();
  const auto candidates = one_hop_candidates(world.graph(), view.anchors, introduced);

  view.observations = observations_from(history);
  const auto prefs = estimate_preferences(view.observations, world.embeddings(),
                                          world.config().ridge);
  view.gcd = current_goal_distance(world, view.anchors, history.goal());
  view.eus = estimated_user_satisfaction(history, prefs);

  const auto& cfg = world.config();
  const int turn = static_cast<int>(history.size()) + 1;
  view.state.inputs.turn_norm = static_cast<double>(turn) / cfg.max_turns;
  view.state.inputs.gcd_norm = view.gcd / cfg.distance.d_max;
  view.state.inputs.eus = view.eus;
  view.state.inputs.cooperation = history.cooperation_sequence();
  view.state.candidates.reserve(candidates.size());
  for (TopicId c : candidates)
    view.state.candidates.push_back(
        {c, world.distance().estimate(c, history.goal()), prefs.at(c)});
  return view;
}

}  // namespace proactive
