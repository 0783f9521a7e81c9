// SPDX-License-Identifier: Apache-2.0
#include "proactive/evaluation.hpp"

#include <cmath>

#include "proactive/errors.hpp"

namespace proactive {

namespace {

constexpr std::uint64_t kInitStream = 21;

// Every front member must be undominated and every excluded round dominated.
void check_front(const RoundResultSet& set) {
  for (const auto& r : set.rounds) {
    bool dominated = false;
    for (const auto& o : set.rounds) dominated = dominated || dominates(o, r);
    bool on_front = false;
    for (const auto& f : set.pareto_front) on_front = on_front || f == r;
    if (dominated == on_front) throw ContractError("pareto front disagrees with dominance check");
  }
}

void write_value(std::ostream& out, double v) {
  if (std::isnan(v))
    out << "NA";
  else
    out << v;
}

}  // namespace

ProtocolResult run_protocol(const TopicWorld& world, const Policy& policy,
                            std::span<const TopicPair> pairs, const ToleranceSpec& tolerance,
                            const ProtocolConfig& cfg, const EpisodeSink& sink) {
  if (pairs.empty()) throw ConfigError("evaluation needs at least one start-goal pair");
  if (cfg.rounds < 1) throw ConfigError("rounds must be >= 1");
  ProtocolResult out;
  out.policy = std::string(policy.name());
  out.tolerance = tolerance;

  std::vector<MetricPair> rounds;
  std::vector<double> gws;
  std::vector<EpisodeRecord> records(pairs.size());
  for (int round = 0; round < cfg.rounds; ++round) {
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const auto seeds = episode_seeds(cfg.seed, static_cast<std::uint64_t>(round), j);
      const auto profile = profile_for(tolerance, world.embeddings(), seeds.profile, cfg.simulator);
      Rng prng(seeds.policy), urng(seeds.user);
      records[j] = run_episode(world, policy, profile, pairs[j].first, pairs[j].second,
                               cfg.simulator, cfg.reward, prng, urng)
                       .record;
      for (const auto& t : records[j].turns)
        if (t.gw) gws.push_back(*t.gw);
      if (sink) sink(round, j, records[j]);
    }
    rounds.push_back({gcr(records, cfg.reward.lambda_decay), us_metric(records)});
  }
  out.metrics = pareto_report(rounds);
  check_front(out.metrics);
  out.has_gw = !gws.empty();
  out.gw = summarize(gws);
  return out;
}

std::vector<ProtocolResult> tolerance_sweep(const TopicWorld& world, const Policy& policy,
                                            std::span<const TopicPair> pairs,
                                            std::span<const ToleranceSpec> tolerances,
                                            const ProtocolConfig& cfg, const EpisodeSink& sink) {
  std::vector<ProtocolResult> out;
  for (const auto& k : tolerances) out.push_back(run_protocol(world, policy, pairs, k, cfg, sink));
  return out;
}

void write_results_header(std::ostream& out) {
  out << "policy\ttolerance\trounds\tgcr\tgcr_sd\tus\tus_sd\tmean_gw\tsd_gw\n";
}

void write_results_row(std::ostream& out, const ProtocolResult& r) {
  const auto old = out.precision(10);
  const double nan = std::nan("");
  out << r.policy << '\t' << r.tolerance.label() << '\t' << r.metrics.rounds.size() << '\t';
  write_value(out, r.metrics.reported.gcr);
  out << '\t';
  write_value(out, r.metrics.sd.gcr);
  out << '\t';
  write_value(out, r.metrics.reported.us);
  out << '\t';
  write_value(out, r.metrics.sd.us);
  out << '\t';
  write_value(out, r.has_gw ? r.gw.mean : nan);
  out << '\t';
  write_value(out, r.has_gw ? r.gw.sd : nan);
  out << '\n';
  out.precision(old);
}

TrainedModel train_model(const TopicWorld& world, std::span<const TopicPair> pairs,
                         const TrainRecipe& recipe) {
  const auto init_seed = derive_seed(recipe.train.seed, {kInitStream});
  GoalWeightModel init = [&] {
    switch (recipe.type) {
      case PolicyType::kProi:
        return GoalWeightModel::proi(recipe.dims, init_seed, recipe.disabled);
      case PolicyType::kDegrade:
        return GoalWeightModel::degrade(init_seed);
      default:
        throw ConfigError("policy '" + std::string(policy_type_name(recipe.type)) +
                          "' is not trainable");
    }
  }();
  DqnTrainer trainer(world, std::move(init), recipe.type, recipe.simulator, recipe.reward,
                     recipe.train);
  TrainedModel out{trainer.model(), {}, 0};
  out.log = trainer.train(pairs);
  out.model = trainer.model();
  out.step_count = trainer.step_count();
  return out;
}

AblationResult ablate_factors(const TopicWorld& world, std::span<const TopicPair> train_pairs,
                              std::span<const TopicPair> test_pairs, FactorMask disable,
                              const TrainRecipe& recipe,
                              std::span<const ToleranceSpec> tolerances,
                              const ProtocolConfig& eval,
                              const std::optional<GoalWeightModel>& full) {
  bool any = false;
  for (bool b : disable) any = any || b;
  if (!any) throw ConfigError("ablation must disable at least one factor");
  if (recipe.type != PolicyType::kProi) throw ConfigError("ablation applies to the proi policy");

  AblationResult out;
  out.disabled = disable;
  TrainRecipe base = recipe;
  base.disabled = {};
  const GoalWeightModel full_model = full ? *full : train_model(world, train_pairs, base).model;
  TrainRecipe ablated = recipe;
  ablated.disabled = disable;
  const auto ablated_model = train_model(world, train_pairs, ablated).model;

  const auto full_policy = Policy::learned(full_model);
  const auto ablated_policy = Policy::learned(ablated_model);
  for (const auto& k : tolerances) {
    out.full.push_back(run_protocol(world, full_policy, test_pairs, k, eval));
    out.ablated.push_back(run_protocol(world, ablated_policy, test_pairs, k, eval));
    out.ablated.back().policy = "proi-" + mask_label(disable);
  }
  return out;
}

std::string mask_label(const FactorMask& mask) {
  std::string s;
  for (std::size_t i = 0; i < kFactorCount; ++i) {
    if (!mask[i]) continue;
    if (!s.empty()) s += '+';
    s += factor_name(static_cast<Factor>(i));
  }
  return s.empty() ? "none" : s;
}

FactorMask parse_mask(std::string_view text) {
  FactorMask mask{};
  if (text == "none" || text.empty()) return mask;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('+', pos);
    const auto token = text.substr(pos, end == std::string_view::npos ? end : end - pos);
    mask[static_cast<std::size_t>(factor_from_name(token))] = true;
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return mask;
}

std::array<FactorSeries, kFactorCount> factor_correlation(std::span<const EpisodeRecord> records) {
  std::array<FactorSeries, kFactorCount> out;
  for (std::size_t f = 0; f < kFactorCount; ++f) out[f].factor = static_cast<Factor>(f);
  for (const auto& rec : records)
    for (const auto& t : rec.turns) {
      if (!t.gw) continue;
      const auto x = t.factors.as_array();
      for (std::size_t f = 0; f < kFactorCount; ++f) {
        out[f].values.push_back(x[f]);
        out[f].gws.push_back(*t.gw);
      }
    }
  for (auto& s : out) s.correlation = pearson(s.values, s.gws);
  return out;
}

void write_factor_pairs(std::ostream& out, const std::array<FactorSeries, kFactorCount>& series) {
  const auto old = out.precision(10);
  out << "factor\tvalue\tgw\n";
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.values.size(); ++i)
      out << factor_name(s.factor) << '\t' << s.values[i] << '\t' << s.gws[i] << '\n';
  out.precision(old);
}

void write_factor_summary(std::ostream& out,
                          const std::array<FactorSeries, kFactorCount>& series) {
  const auto old = out.precision(10);
  out << "factor\tpairs\tr\tdegenerate\n";
  for (const auto& s : series)
    out << factor_name(s.factor) << '\t' << s.values.size() << '\t' << s.correlation.r << '\t'
        << (s.correlation.degenerate ? 1 : 0) << '\n';
  out.precision(old);
}

}  // namespace proactive
