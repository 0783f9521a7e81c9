// SPDX-License-Identifier: Apache-2.0
#include "proactive/policy.hpp"

#include <algorithm>
#include <random>

#include "proactive/errors.hpp"

namespace proactive {

namespace {

// Position i (1-based) after sorting is the rank; `lower_rank` puts the
// entries that should get the smallest ranks first.
template <typename Less>
RankMap rank_by(std::span<const std::pair<TopicId, double>> values, Less lower_rank) {
  std::vector<std::pair<TopicId, double>> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), lower_rank);
  RankMap ranks;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    ranks[sorted[i].first] = static_cast<int>(i + 1);
  return ranks;
}

}  // namespace

RankMap rank_descending_distance(std::span<const std::pair<TopicId, double>> distances) {
  return rank_by(distances, [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first > b.first;
  });
}

RankMap rank_ascending_preference(std::span<const std::pair<TopicId, double>> preferences) {
  return rank_by(preferences, [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first > b.first;
  });
}

std::vector<CandidateScore> score_candidates(std::span<const CandidateInput> candidates,
                                             double gw) {
  if (candidates.empty()) throw EmptyCandidatesError();
  std::vector<std::pair<TopicId, double>> dist, pref;
  for (const auto& c : candidates) {
    dist.emplace_back(c.topic, c.est_distance);
    pref.emplace_back(c.topic, c.est_preference);
  }
  const auto rank_d = rank_descending_distance(dist);
  const auto rank_p = rank_ascending_preference(pref);
  std::vector<CandidateScore> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    CandidateScore s{c.topic, c.est_distance, c.est_preference, rank_d.at(c.topic),
                     rank_p.at(c.topic), 0.0};
    s.score = gw * s.rank_d + (1.0 - gw) * s.rank_p;
    out.push_back(s);
  }
  return out;
}

std::string_view policy_type_name(PolicyType t) noexcept {
  switch (t) {
    case PolicyType::kRandom: return "random";
    case PolicyType::kPopGcr: return "pop_gcr";
    case PolicyType::kPopUs: return "pop_us";
    case PolicyType::kDegrade: return "degrade";
    case PolicyType::kProi: return "proi";
  }
  return "random";
}

PolicyType policy_type_from_name(std::string_view name) {
  for (auto t : {PolicyType::kRandom, PolicyType::kPopGcr, PolicyType::kPopUs,
                 PolicyType::kDegrade, PolicyType::kProi})
    if (policy_type_name(t) == name) return t;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

Policy Policy::baseline(PolicyType type) {
  if (type == PolicyType::kDegrade || type == PolicyType::kProi)
    throw ConfigError("learned policies need a model");
  return Policy{type, nullptr};
}

Policy Policy::learned(GoalWeightModel model) {
  const auto type = model.kind() == GoalWeightModel::Kind::kProi ? PolicyType::kProi
                                                                 : PolicyType::kDegrade;
  return Policy{type, std::make_shared<const GoalWeightModel>(std::move(model))};
}

std::size_t argmax_score(std::span<const CandidateScore> scores) {
  if (scores.empty()) throw EmptyCandidatesError();
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const auto& a = scores[i];
    const auto& b = scores[best];
    if (a.score > b.score || (a.score == b.score && a.topic < b.topic)) best = i;
  }
  return best;
}

Decision select_topic(const Policy& policy, const DecisionState& state, Rng& rng,
                      double explore_epsilon) {
  if (state.candidates.empty()) throw EmptyCandidatesError();
  Decision d;
  d.factors = {state.inputs.turn_norm, state.inputs.gcd_norm, state.inputs.eus, 0.5};

  double gw = 0.5;
  switch (policy.type) {
    case PolicyType::kRandom:
      break;
    case PolicyType::kPopGcr:
      gw = 1.0;
      break;
    case PolicyType::kPopUs:
      gw = 0.0;
      break;
    case PolicyType::kDegrade:
    case PolicyType::kProi: {
      if (!policy.model) throw ConfigError("learned policy has no model");
      const auto trace = policy.model->forward(state.inputs);
      gw = trace.gw;
      d.factors.cd = trace.cd;
      break;
    }
  }
  d.scores = score_candidates(state.candidates, gw);
  if (policy.type == PolicyType::kRandom) {
    for (auto& s : d.scores) s.score = 0.0;
    std::uniform_int_distribution<std::size_t> pick(0, state.candidates.size() - 1);
    d.index = pick(rng);
  } else {
    d.gw = gw;
    d.index = argmax_score(d.scores);
  }
  if (explore_epsilon > 0 && uniform01(rng) < explore_epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, state.candidates.size() - 1);
    d.index = pick(rng);
    d.explored = true;
  }
  d.topic = state.candidates[d.index].topic;
  return d;
}

}  // namespace proactive
