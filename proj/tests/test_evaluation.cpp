// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <sstream>

#include "mini_world.hpp"
#include "proactive/errors.hpp"
#include "proactive/evaluation.hpp"
#include "proactive/metrics.hpp"
#include "support.hpp"

using namespace proactive;
using namespace testing_support;

namespace {

ProtocolConfig small_protocol(int rounds = 3) {
  ProtocolConfig cfg;
  cfg.rounds = rounds;
  return cfg;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

EpisodeRecord with_gw(const std::vector<std::pair<FactorVector, double>>& turns) {
  EpisodeRecord r;
  for (const auto& [f, gw] : turns) {
    TurnRecord t;
    t.factors = f;
    t.gw = gw;
    r.turns.push_back(t);
  }
  return r;
}

}  // namespace

TEST_CASE("protocol is deterministic and its US equals the simulator's own value") {
  const auto mw = make_mini_world();
  const auto& pairs = mw->synth.test_pairs;
  const auto policy = Policy::baseline(PolicyType::kRandom);
  std::vector<EpisodeRecord> seen;
  const auto a = run_protocol(*mw->world, policy, pairs, ToleranceSpec::fixed(1.0), small_protocol(),
                              [&](int, std::size_t, const EpisodeRecord& r) { seen.push_back(r); });
  const auto b = run_protocol(*mw->world, policy, pairs, ToleranceSpec::fixed(1.0), small_protocol());
  CHECK(a.metrics.rounds == b.metrics.rounds);
  CHECK(a.metrics.reported == b.metrics.reported);
  CHECK(a.metrics.sd == b.metrics.sd);
  CHECK(a.policy == "random");
  CHECK_FALSE(a.has_gw);
  REQUIRE(seen.size() == 3 * pairs.size());
  for (const auto& r : seen) {
    CHECK(std::abs(episode_us(r) - r.final_us) < 1e-12);
    for (const auto& t : r.turns) CHECK_FALSE(t.explored);
  }
  for (const auto& m : a.metrics.rounds) {
    CHECK(m.gcr >= 0.0);
    CHECK(m.gcr <= 1.0);
    CHECK(m.us >= 0.0);
    CHECK(m.us <= 1.0);
  }
}

TEST_CASE("paired users: popularity by preference beats random on satisfaction") {
  const auto mw = make_mini_world(80, 60, 5);
  const auto& pairs = mw->synth.test_pairs;
  const auto cfg = small_protocol(4);
  const auto rnd = run_protocol(*mw->world, Policy::baseline(PolicyType::kRandom), pairs,
                                ToleranceSpec::fixed(1.0), cfg);
  const auto pus = run_protocol(*mw->world, Policy::baseline(PolicyType::kPopUs), pairs,
                                ToleranceSpec::fixed(1.0), cfg);
  const auto pgcr = run_protocol(*mw->world, Policy::baseline(PolicyType::kPopGcr), pairs,
                                 ToleranceSpec::fixed(1.0), cfg);
  CHECK(pus.metrics.mean.us > rnd.metrics.mean.us);
  CHECK(pgcr.metrics.mean.gcr > rnd.metrics.mean.gcr);
}

TEST_CASE("tolerance sweep and result rows") {
  const auto mw = make_mini_world();
  auto model = GoalWeightModel::proi({}, 3);
  const std::vector<ToleranceSpec> ks{ToleranceSpec::fixed(0.8), ToleranceSpec::fixed(1.2),
                                      ToleranceSpec::mixed()};
  const auto rows = tolerance_sweep(*mw->world, Policy::learned(model), mw->synth.test_pairs, ks,
                                    small_protocol(2));
  REQUIRE(rows.size() == 3);
  std::ostringstream out;
  write_results_header(out);
  for (const auto& r : rows) {
    CHECK(r.has_gw);
    CHECK(r.gw.mean > 0.0);
    CHECK(r.gw.mean < 1.0);
    write_results_row(out, r);
  }
  const auto lines = split_lines(out.str());
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "policy\ttolerance\trounds\tgcr\tgcr_sd\tus\tus_sd\tmean_gw\tsd_gw");
  CHECK(lines[1].rfind("proi\t0.8\t2\t", 0) == 0);
  CHECK(lines[3].rfind("proi\tmixed\t2\t", 0) == 0);

  std::ostringstream base;
  write_results_row(base, run_protocol(*mw->world, Policy::baseline(PolicyType::kRandom),
                                       mw->synth.test_pairs, ToleranceSpec::fixed(1.0),
                                       small_protocol(1)));
  CHECK(base.str().find("\tNA\tNA\n") != std::string::npos);
}

TEST_CASE("mask labels") {
  CHECK(mask_label({}) == "none");
  const auto m = parse_mask("turn+gcd");
  CHECK(m == FactorMask{true, true, false, false});
  CHECK(mask_label(m) == "turn+gcd");
  CHECK(mask_label(parse_mask("cd+eus")) == "eus+cd");
  CHECK_THROWS_AS(parse_mask("turn+mood"), ConfigError);
  CHECK(parse_mask("") == FactorMask{});
  CHECK(parse_mask("none") == FactorMask{});
}

TEST_CASE("factor correlation") {
  std::vector<EpisodeRecord> recs;
  recs.push_back(with_gw({{{0.1, 0.2, 0.3, 0.4}, 0.1}, {{0.2, 0.2, 0.3, 0.4}, 0.2}}));
  recs.push_back(with_gw({{{0.3, 0.2, 0.3, 0.4}, 0.3}, {{0.5, 0.2, 0.3, 0.4}, 0.5}}));
  EpisodeRecord no_gw;
  no_gw.turns.resize(3);
  recs.push_back(no_gw);
  const auto s = factor_correlation(recs);
  CHECK(s[0].values.size() == 4);
  CHECK(s[0].correlation.r == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s[1].correlation.degenerate);
  CHECK(s[1].correlation.r == 0.0);

  std::ostringstream pairs, summary;
  write_factor_pairs(pairs, s);
  write_factor_summary(summary, s);
  CHECK(split_lines(pairs.str()).size() == 1 + 4 * 4);
  const auto sl = split_lines(summary.str());
  REQUIRE(sl.size() == 5);
  CHECK(sl[0] == "factor\tpairs\tr\tdegenerate");
  CHECK(sl[1].rfind("turn\t4\t1", 0) == 0);
}

TEST_CASE("ablation trains the masked variant on identical seeds") {
  const auto mw = make_mini_world();
  TrainRecipe recipe;
  recipe.train.epochs = 1;
  recipe.train.batch_size = 8;
  recipe.train.memory_capacity = 100;
  recipe.train.probe_pairs = 3;
  const std::span<const TopicPair> train(mw->synth.train_pairs.data(), 10);
  const std::vector<ToleranceSpec> ks{ToleranceSpec::fixed(1.0)};
  const auto res = ablate_factors(*mw->world, train, mw->synth.test_pairs,
                                  parse_mask("eus+cd"), recipe, ks, small_protocol(1));
  REQUIRE(res.full.size() == 1);
  REQUIRE(res.ablated.size() == 1);
  CHECK(res.full[0].policy == "proi");
  CHECK(res.ablated[0].policy == "proi-eus+cd");

  auto masked = recipe;
  masked.disabled = parse_mask("eus+cd");
  const auto direct = train_model(*mw->world, train, masked);
  const auto again = run_protocol(*mw->world, Policy::learned(direct.model), mw->synth.test_pairs,
                                  ks[0], small_protocol(1));
  CHECK(again.metrics.rounds == res.ablated[0].metrics.rounds);
}
