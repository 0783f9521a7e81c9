// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <random>

#include "proactive/errors.hpp"
#include "proactive/policy.hpp"
#include "support.hpp"

using namespace proactive;
using testing_support::tid;

namespace {

using Pairs = std::vector<std::pair<TopicId, double>>;

// Oracle: rank of x = 1 + number of items that sort before it, where an item
// sorts before x if its key is "worse" or, on equal keys, its id is larger.
RankMap oracle_rank(const Pairs& xs, bool smaller_is_better) {
  RankMap out;
  for (const auto& [t, v] : xs) {
    int r = 1;
    for (const auto& [u, w] : xs) {
      if (u == t) continue;
      const bool worse = smaller_is_better ? w > v : w < v;
      if (worse || (w == v && u > t)) ++r;
    }
    out[t] = r;
  }
  return out;
}

Pairs random_pairs(std::mt19937_64& rng, int n, int levels) {
  std::uniform_int_distribution<int> v(0, levels);
  std::vector<int> ids(3 * n);
  for (int i = 0; i < 3 * n; ++i) ids[i] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  Pairs out;
  for (int i = 0; i < n; ++i) out.emplace_back(tid(ids[i]), v(rng) / double(levels));
  return out;
}

std::vector<CandidateInput> candidates(const std::vector<std::tuple<int, double, double>>& rows) {
  std::vector<CandidateInput> out;
  for (const auto& [id, d, p] : rows) out.push_back({tid(id), d, p});
  return out;
}

DecisionState state_of(std::vector<CandidateInput> c) {
  DecisionState s;
  s.candidates = std::move(c);
  return s;
}

}  // namespace

TEST_CASE("rank examples") {
  const TopicId A = tid(0), B = tid(1), C = tid(2);
  auto r = rank_descending_distance(Pairs{{A, 5}, {B, 2}, {C, 9}});
  CHECK(r == RankMap{{A, 2}, {B, 3}, {C, 1}});
  r = rank_descending_distance(Pairs{{A, 2}, {B, 2}, {C, 5}});
  CHECK(r == RankMap{{A, 3}, {B, 2}, {C, 1}});
  CHECK(rank_descending_distance(Pairs{{B, 4}}) == RankMap{{B, 1}});

  r = rank_ascending_preference(Pairs{{A, 0.1}, {B, 0.9}, {C, 0.5}});
  CHECK(r == RankMap{{A, 1}, {B, 3}, {C, 2}});
  r = rank_ascending_preference(Pairs{{A, 0.4}, {B, 0.4}, {C, 0.4}});
  CHECK(r == RankMap{{A, 3}, {B, 2}, {C, 1}});
  r = rank_ascending_preference(Pairs{{A, 0.2}, {B, 0.8}});
  CHECK(r == RankMap{{A, 1}, {B, 2}});
}

TEST_CASE("ranks match the counting oracle, form permutations, ignore monotone transforms") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 400; ++trial) {
    const auto xs = random_pairs(rng, 1 + trial % 12, 1 + trial % 5);
    const auto rd = rank_descending_distance(xs);
    const auto rp = rank_ascending_preference(xs);
    CHECK(rd == oracle_rank(xs, true));
    CHECK(rp == oracle_rank(xs, false));
    std::vector<int> ranks;
    for (const auto& [t, k] : rd) ranks.push_back(k);
    std::sort(ranks.begin(), ranks.end());
    for (std::size_t i = 0; i < ranks.size(); ++i) CHECK(ranks[i] == static_cast<int>(i + 1));

    Pairs moved = xs;
    for (auto& [t, v] : moved) v = 2 * v + 1;
    std::reverse(moved.begin(), moved.end());
    CHECK(rank_descending_distance(moved) == rd);
    CHECK(rank_ascending_preference(moved) == rp);
  }
}

TEST_CASE("score example") {
  // A: distance rank 2, preference rank 3; B: (3, 1); C: (1, 2).
  const auto c = candidates({{0, 4.0, 0.9}, {1, 1.0, 0.1}, {2, 6.0, 0.5}});
  const auto s = score_candidates(c, 0.5);
  REQUIRE(s.size() == 3);
  CHECK(s[0].rank_d == 2);
  CHECK(s[0].rank_p == 3);
  CHECK(s[1].rank_d == 3);
  CHECK(s[1].rank_p == 1);
  CHECK(s[0].score == 2.5);
  CHECK(s[1].score == 2.0);
  CHECK(s[2].score == 1.5);
  CHECK(s[2].est_distance == 6.0);
  CHECK(argmax_score(s) == 0);
  CHECK_THROWS_AS(score_candidates({}, 0.5), EmptyCandidatesError);
}

TEST_CASE("baseline selections") {
  Rng rng(1);
  const auto two = state_of(candidates({{0, 3.0, 0.9}, {1, 1.0, 0.3}}));
  CHECK(select_topic(Policy::baseline(PolicyType::kPopGcr), two, rng).topic == tid(1));
  CHECK(select_topic(Policy::baseline(PolicyType::kPopUs), two, rng).topic == tid(0));
  const auto rnd = select_topic(Policy::baseline(PolicyType::kRandom), two, rng);
  CHECK_FALSE(rnd.gw.has_value());
  CHECK_THROWS_AS(select_topic(Policy::baseline(PolicyType::kPopGcr), DecisionState{}, rng),
                  EmptyCandidatesError);
  CHECK_THROWS(Policy::baseline(PolicyType::kProi));
}

TEST_CASE("policy names") {
  for (auto t : {PolicyType::kRandom, PolicyType::kPopGcr, PolicyType::kPopUs, PolicyType::kDegrade,
                 PolicyType::kProi})
    CHECK(policy_type_from_name(policy_type_name(t)) == t);
  CHECK_THROWS_AS(policy_type_from_name("greedy"), ConfigError);
}

TEST_CASE("random is uniform and exploration overrides") {
  Rng rng(7);
  const auto s = state_of(candidates({{0, 1, 0.1}, {1, 2, 0.2}, {2, 3, 0.3}, {3, 4, 0.4}}));
  std::vector<int> counts(4);
  for (int i = 0; i < 8000; ++i) ++counts[select_topic(Policy::baseline(PolicyType::kRandom), s, rng).index];
  for (int c : counts) CHECK(std::abs(c - 2000) < 200);

  int explored = 0;
  for (int i = 0; i < 4000; ++i) {
    const auto d = select_topic(Policy::baseline(PolicyType::kPopGcr), s, rng, 0.2);
    if (d.explored) ++explored;
    else CHECK(d.topic == tid(0));
  }
  CHECK(std::abs(explored - 800) < 100);
}

TEST_CASE("degrade with saturated beta reproduces the popularity baselines") {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<CandidateInput> c;
    for (int i = 0; i < 2 + trial % 9; ++i) c.push_back({tid(i * 3 + 1), std::floor(u(g) * 7), u(g)});
    const auto s = state_of(c);
    Rng rng(0);
    auto hi = GoalWeightModel::degrade(0);
    hi.params()[0] = 50;
    auto lo = hi;
    lo.params()[0] = -50;
    const auto pg = select_topic(Policy::baseline(PolicyType::kPopGcr), s, rng);
    const auto pu = select_topic(Policy::baseline(PolicyType::kPopUs), s, rng);
    CHECK(select_topic(Policy::learned(hi), s, rng).topic == pg.topic);
    CHECK(select_topic(Policy::learned(lo), s, rng).topic == pu.topic);
  }
}

TEST_CASE("low goal weight favors the preferred topic") {
  // Three candidates: one a step closer to the goal but disliked, one liked
  // but farther. With gw = 0.07 the liked topic wins.
  auto m = GoalWeightModel::degrade(0);
  m.params()[0] = std::log(0.07 / 0.93);
  const auto s = state_of(candidates({{0, 2.0, 0.15}, {1, 4.0, 0.85}, {2, 3.0, 0.40}}));
  Rng rng(0);
  const auto d = select_topic(Policy::learned(m), s, rng);
  CHECK(*d.gw == doctest::Approx(0.07).epsilon(1e-12));
  CHECK(d.topic == tid(1));
  CHECK(d.scores[1].score == doctest::Approx(0.07 * 1 + 0.93 * 3));
}

TEST_CASE("selection is a pure function at epsilon 0") {
  auto m = GoalWeightModel::proi({}, 5);
  const auto s = state_of(candidates({{4, 2.0, 0.3}, {9, 2.0, 0.3}, {1, 5.0, 0.7}}));
  Rng a(1), b(999);
  const auto x = select_topic(Policy::learned(m), s, a);
  const auto y = select_topic(Policy::learned(m), s, b);
  CHECK(x.topic == y.topic);
  CHECK(*x.gw == *y.gw);
}
