// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "proactive/dialogue.hpp"
#include "proactive/embeddings.hpp"
#include "proactive/graph.hpp"
#include "proactive/rng.hpp"

namespace proactive {

struct SimulatorConfig {
  double q_c_star = 0.5;
  double q_q_star = 0.4;
  int mention_hops = 3;
  int max_mentions = 3;
  int max_sample_attempts = 20;

  void validate() const;
};

struct UserProfile {
  std::vector<double> user_vector;
  std::vector<double> preferences;  // min-max normalized E.u
  double tolerance = 1.0;
  double q_cooperative = 0.5;
  double q_quit = 0.4;
  std::uint64_t seed = 0;

  double preference(TopicId t) const { return preferences.at(t.index()); }
};

// Same seed gives the same user vector for every tolerance.
UserProfile sample_profile(const EmbeddingTable& embeddings, double tolerance, std::uint64_t seed,
                           const SimulatorConfig& cfg);

// Mean preference over the distinct topics of one turn: the agent topic
// plus whatever the user mentioned.
double turn_satisfaction(const UserProfile& profile, const Turn& turn);

// Cumulative satisfaction over the turns of `history`, plus an optional
// pending agent topic counted as a turn containing only itself.
double satisfaction(const UserProfile& profile, const DialogueHistory& history,
                    std::optional<TopicId> pending_agent_topic);

enum class Behavior { kCooperative, kNonCooperative, kQuit };

// Threshold rule on decision-time satisfaction.
Behavior classify_behavior(double satisfaction, const UserProfile& profile) noexcept;

// Responds to `agent_topic`. If the history's last turn is that same topic
// still awaiting an answer it is not counted twice.
UserResponse respond(const UserProfile& profile, const KnowledgeGraph& graph,
                     const DialogueHistory& history, TopicId agent_topic,
                     const SimulatorConfig& cfg, Rng& rng);

// Profiles with tolerance drawn uniformly from {0.8, 1.0, 1.2}.
class MixedProfileSource {
 public:
  static constexpr double kTolerances[3] = {0.8, 1.0, 1.2};

  MixedProfileSource(const EmbeddingTable& embeddings, SimulatorConfig cfg, std::uint64_t seed);
  UserProfile next();

 private:
  const EmbeddingTable* embeddings_;
  SimulatorConfig cfg_;
  Rng rng_;
};

}  // namespace proactive
