// SPDX-License-Identifier: Apache-2.0
#include "proactive/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "proactive/errors.hpp"

namespace proactive {

void SimulatorConfig::validate() const {
  if (!(q_q_star > 0 && q_q_star < q_c_star && q_c_star < 1))
    throw ConfigError("simulator thresholds must satisfy 0 < q_q_star < q_c_star < 1");
  if (mention_hops < 1) throw ConfigError("mention_hops must be >= 1");
  if (max_mentions < 1) throw ConfigError("max_mentions must be >= 1");
  if (max_sample_attempts < 1) throw ConfigError("max_sample_attempts must be >= 1");
}

UserProfile sample_profile(const EmbeddingTable& emb, double tolerance, std::uint64_t seed,
                           const SimulatorConfig& cfg) {
  if (!(tolerance > 0)) throw ConfigError("tolerance k must be positive");
  cfg.validate();
  UserProfile p;
  p.seed = seed;
  p.tolerance = tolerance;
  p.q_cooperative = cfg.q_c_star / tolerance;
  p.q_quit = cfg.q_q_star / tolerance;

  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(2.0));
  p.user_vector.resize(emb.dim());
  for (double& v : p.user_vector) v = gauss(rng);

  std::vector<double> raw(emb.rows());
  for (std::uint32_t i = 0; i < emb.rows(); ++i) {
    auto row = emb.row(TopicId{i});
    double dot = 0.0;
    for (int k = 0; k < emb.dim(); ++k) dot += row[k] * p.user_vector[k];
    raw[i] = dot;
  }
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double span = raw.empty() ? 0.0 : *hi - *lo;
  p.preferences.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    p.preferences[i] = span > 0 ? (raw[i] - *lo) / span : 0.5;
  return p;
}

double turn_satisfaction(const UserProfile& profile, const Turn& turn) {
  double sum = profile.preference(turn.agent_topic);
  int count = 1;
  if (turn.response) {
    if (const auto* n = std::get_if<NonCooperative>(&*turn.response)) {
      for (const auto& m : n->mentions) {
        if (m.topic == turn.agent_topic) continue;
        sum += profile.preference(m.topic);
        ++count;
      }
    }
  }
  return sum / count;
}

double satisfaction(const UserProfile& profile, const DialogueHistory& history,
                    std::optional<TopicId> pending) {
  if (history.turns().empty() && !pending)
    throw UndefinedStateError("satisfaction needs at least one turn or a pending topic");
  double sum = 0.0;
  for (const auto& t : history.turns()) sum += turn_satisfaction(profile, t);
  std::size_t count = history.turns().size();
  if (pending) {
    sum += profile.preference(*pending);
    ++count;
  }
  return sum / static_cast<double>(count);
}

Behavior classify_behavior(double us, const UserProfile& profile) noexcept {
  if (us > profile.q_cooperative) return Behavior::kCooperative;
  if (us > profile.q_quit) return Behavior::kNonCooperative;
  return Behavior::kQuit;
}

UserResponse respond(const UserProfile& profile, const KnowledgeGraph& graph,
                     const DialogueHistory& history, TopicId agent_topic,
                     const SimulatorConfig& cfg, Rng& rng) {
  if (!graph.contains(agent_topic))
    throw LookupError("unknown topic id " + std::to_string(agent_topic.value));
  const bool already_recorded =
      history.awaiting_response() && history.turns().back().agent_topic == agent_topic;
  const double us = satisfaction(profile, history,
                                 already_recorded ? std::nullopt : std::optional{agent_topic});

  switch (classify_behavior(us, profile)) {
    case Behavior::kCooperative:
      return Cooperative{agent_topic, profile.preference(agent_topic)};
    case Behavior::kQuit:
      return Quit{};
    case Behavior::kNonCooperative:
      break;
  }

  std::vector<TopicId> pool;
  for (const auto& [topic, hop] : khop_ball(graph, agent_topic, cfg.mention_hops))
    if (topic != agent_topic) pool.push_back(topic);
  if (pool.empty()) throw ContractError("agent topic has no neighbors to mention");

  auto by_preference = [&](TopicId a, TopicId b) {
    const double pa = profile.preference(a), pb = profile.preference(b);
    return pa != pb ? pa > pb : a < b;
  };

  std::vector<TopicId> chosen;
  for (int attempt = 0; attempt < cfg.max_sample_attempts && chosen.empty(); ++attempt)
    for (TopicId t : pool)
      if (uniform01(rng) < profile.preference(t)) chosen.push_back(t);
  if (chosen.empty()) chosen.push_back(*std::min_element(pool.begin(), pool.end(), by_preference));
  if (static_cast<int>(chosen.size()) > cfg.max_mentions) {
    std::partial_sort(chosen.begin(), chosen.begin() + cfg.max_mentions, chosen.end(),
                      by_preference);
    chosen.resize(cfg.max_mentions);
  }
  std::sort(chosen.begin(), chosen.end());

  NonCooperative out;
  for (TopicId t : chosen) out.mentions.push_back({t, profile.preference(t)});
  return out;
}

MixedProfileSource::MixedProfileSource(const EmbeddingTable& embeddings, SimulatorConfig cfg,
                                       std::uint64_t seed)
    : embeddings_(&embeddings), cfg_(cfg), rng_(seed) {
  cfg_.validate();
}

UserProfile MixedProfileSource::next() {
  std::uniform_int_distribution<int> pick(0, 2);
  const double k = kTolerances[pick(rng_)];
  const std::uint64_t seed = rng_();
  return sample_profile(*embeddings_, k, seed, cfg_);
}

}  // namespace proactive
