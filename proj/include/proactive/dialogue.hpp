// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "proactive/graph.hpp"

namespace proactive {

struct Mention {
  TopicId topic;
  double preference = 0.0;  // in [0,1]
};

struct Cooperative {
  TopicId topic;
  double preference = 0.0;
};

// 1..3 duplicate-free mentions of off-path topics.
struct NonCooperative {
  std::vector<Mention> mentions;
};

struct Quit {};

using UserResponse = std::variant<Cooperative, NonCooperative, Quit>;

bool is_cooperative(const UserResponse& r) noexcept;
bool is_quit(const UserResponse& r) noexcept;
std::string_view response_kind(const UserResponse& r) noexcept;

// Topics and preferences the user revealed in a response.
std::vector<Mention> revealed_preferences(const UserResponse& r);

enum class Outcome { kOngoing, kSuccess, kQuit, kTimeout };

std::string_view outcome_name(Outcome o) noexcept;
Outcome outcome_from_name(std::string_view name);

// The terminal success turn carries no response: the user is never asked.
struct Turn {
  TopicId agent_topic;
  std::optional<UserResponse> response;
};

class DialogueHistory {
 public:
  DialogueHistory(TopicId start, TopicId goal, int max_turns);

  TopicId start() const noexcept { return start_; }
  TopicId goal() const noexcept { return goal_; }
  int max_turns() const noexcept { return max_turns_; }
  const std::vector<Turn>& turns() const noexcept { return turns_; }
  std::size_t size() const noexcept { return turns_.size(); }
  Outcome outcome() const noexcept { return outcome_; }
  bool ended() const noexcept { return outcome_ != Outcome::kOngoing; }

  // Records an agent topic. Introducing the goal ends the dialogue.
  void add_agent_topic(TopicId topic);
  // Answers the pending agent topic. Quit ends the dialogue; reaching the
  // turn limit ends it as a timeout.
  void add_response(UserResponse response);
  // Marks a dialogue that cannot continue (no candidates) as a failure.
  void end_as_failure();
  bool awaiting_response() const noexcept;

  // Topics the next candidate set is built around: the agent's own last
  // topic after a cooperative turn, every mentioned topic after a
  // non-cooperative one, the start topic before the first turn.
  std::vector<TopicId> anchors() const;
  std::vector<TopicId> agent_topics() const;
  // 0 = cooperative, 1 = non-cooperative, for each answered turn.
  std::vector<int> cooperation_sequence() const;

 private:
  TopicId start_;
  TopicId goal_;
  int max_turns_;
  std::vector<Turn> turns_;
  Outcome outcome_ = Outcome::kOngoing;
};

}  // namespace proactive
