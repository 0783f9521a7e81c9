// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "proactive/dialogue.hpp"
#include "proactive/goal_weight_net.hpp"
#include "proactive/graph.hpp"

namespace proactive {

struct TurnRecord {
  int turn = 0;  // 1-based
  TopicId agent_topic;
  double agent_preference = 0.0;  // true preference of the agent topic
  std::optional<UserResponse> response;  // absent on the success turn
  double us = 0.0;                       // simulator satisfaction after the turn
  std::optional<double> gw;
  FactorVector factors;
  double est_distance = 0.0;  // ed(agent topic, goal)
  bool explored = false;
};

struct EpisodeRecord {
  TopicId start;
  TopicId goal;
  double tolerance = 1.0;
  Outcome outcome = Outcome::kOngoing;
  std::vector<TurnRecord> turns;
  double final_us = 0.0;  // satisfaction as computed by the simulator itself
  double total_reward = 0.0;

  int turn_count() const noexcept { return static_cast<int>(turns.size()); }
  bool success() const noexcept { return outcome == Outcome::kSuccess; }
};

// One JSON object per line; schema in docs/formats.md.
std::string episode_to_json(const EpisodeRecord& record, const KnowledgeGraph& graph,
                            const std::string& policy, int round);
void write_transcript_line(std::ostream& out, const EpisodeRecord& record,
                           const KnowledgeGraph& graph, const std::string& policy, int round);

}  // namespace proactive
