// SPDX-License-Identifier: Apache-2.0
#include "proactive/dialogue.hpp"

#include "proactive/errors.hpp"

namespace proactive {

bool is_cooperative(const UserResponse& r) noexcept {
  return std::holds_alternative<Cooperative>(r);
}

bool is_quit(const UserResponse& r) noexcept { return std::holds_alternative<Quit>(r); }

std::string_view response_kind(const UserResponse& r) noexcept {
  if (std::holds_alternative<Cooperative>(r)) return "cooperative";
  if (std::holds_alternative<NonCooperative>(r)) return "topics";
  return "quit";
}

std::vector<Mention> revealed_preferences(const UserResponse& r) {
  if (const auto* c = std::get_if<Cooperative>(&r)) return {{c->topic, c->preference}};
  if (const auto* n = std::get_if<NonCooperative>(&r)) return n->mentions;
  return {};
}

std::string_view outcome_name(Outcome o) noexcept {
  switch (o) {
    case Outcome::kOngoing: return "ongoing";
    case Outcome::kSuccess: return "success";
    case Outcome::kQuit: return "quit";
    case Outcome::kTimeout: return "timeout";
  }
  return "ongoing";
}

Outcome outcome_from_name(std::string_view name) {
  if (name == "ongoing") return Outcome::kOngoing;
  if (name == "success") return Outcome::kSuccess;
  if (name == "quit") return Outcome::kQuit;
  if (name == "timeout") return Outcome::kTimeout;
  throw DataError("unknown outcome '" + std::string(name) + "'");
}

DialogueHistory::DialogueHistory(TopicId start, TopicId goal, int max_turns)
    : start_(start), goal_(goal), max_turns_(max_turns) {
  if (max_turns <= 0) throw ConfigError("max_turns must be positive");
}

bool DialogueHistory::awaiting_response() const noexcept {
  return !ended() && !turns_.empty() && !turns_.back().response.has_value();
}

void DialogueHistory::add_agent_topic(TopicId topic) {
  if (ended()) throw ContractError("dialogue already ended");
  if (awaiting_response()) throw ContractError("previous agent topic has no response yet");
  if (static_cast<int>(turns_.size()) >= max_turns_)
    throw ContractError("turn limit reached");
  turns_.push_back({topic, std::nullopt});
  if (topic == goal_) outcome_ = Outcome::kSuccess;
}

void DialogueHistory::add_response(UserResponse response) {
  if (!awaiting_response()) throw ContractError("no agent topic awaiting a response");
  const bool quit = is_quit(response);
  turns_.back().response = std::move(response);
  if (quit)
    outcome_ = Outcome::kQuit;
  else if (static_cast<int>(turns_.size()) >= max_turns_)
    outcome_ = Outcome::kTimeout;
}

void DialogueHistory::end_as_failure() {
  if (ended()) throw ContractError("dialogue already ended");
  outcome_ = Outcome::kTimeout;
}

std::vector<TopicId> DialogueHistory::anchors() const {
  if (turns_.empty()) return {start_};
  const Turn& last = turns_.back();
  if (last.response) {
    if (const auto* n = std::get_if<NonCooperative>(&*last.response)) {
      std::vector<TopicId> out;
      for (const auto& m : n->mentions) out.push_back(m.topic);
      return out;
    }
  }
  return {last.agent_topic};
}

std::vector<TopicId> DialogueHistory::agent_topics() const {
  std::vector<TopicId> out;
  out.reserve(turns_.size());
  for (const auto& t : turns_) out.push_back(t.agent_topic);
  return out;
}

std::vector<int> DialogueHistory::cooperation_sequence() const {
  std::vector<int> seq;
  for (const auto& t : turns_) {
    if (!t.response || is_quit(*t.response)) continue;
    seq.push_back(is_cooperative(*t.response) ? 0 : 1);
  }
  return seq;
}

}  // namespace proactive
