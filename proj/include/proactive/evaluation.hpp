// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "proactive/metrics.hpp"
#include "proactive/trainer.hpp"
#include "proactive/world_gen.hpp"

namespace proactive {

struct ProtocolConfig {
  int rounds = 100;
  std::uint64_t seed = 11;
  SimulatorConfig simulator;
  RewardConfig reward;  // lambda for GCR; rewards reported in transcripts
};

using EpisodeSink = std::function<void(int round, std::size_t pair, const EpisodeRecord&)>;

struct ProtocolResult {
  std::string policy;
  ToleranceSpec tolerance;
  RoundResultSet metrics;
  Summary gw;  // over every turn of every episode; zero for gw-free policies
  bool has_gw = false;
};

// `rounds` passes over `pairs` with ε = 0. Episode (round, pair) meets the
// same simulated user under every policy.
ProtocolResult run_protocol(const TopicWorld& world, const Policy& policy,
                            std::span<const TopicPair> pairs, const ToleranceSpec& tolerance,
                            const ProtocolConfig& cfg, const EpisodeSink& sink = {});

std::vector<ProtocolResult> tolerance_sweep(const TopicWorld& world, const Policy& policy,
                                            std::span<const TopicPair> pairs,
                                            std::span<const ToleranceSpec> tolerances,
                                            const ProtocolConfig& cfg,
                                            const EpisodeSink& sink = {});

// policy tolerance rounds gcr gcr_sd us us_sd mean_gw sd_gw
void write_results_header(std::ostream& out);
void write_results_row(std::ostream& out, const ProtocolResult& r);

struct TrainedModel {
  GoalWeightModel model;
  std::vector<EpochLog> log;
  long step_count = 0;
};

struct TrainRecipe {
  PolicyType type = PolicyType::kProi;
  NetDims dims;
  FactorMask disabled{};
  SimulatorConfig simulator;
  RewardConfig reward;
  TrainConfig train;
};

// Seeded initialization plus the full DQN schedule.
TrainedModel train_model(const TopicWorld& world, std::span<const TopicPair> pairs,
                         const TrainRecipe& recipe);

struct AblationResult {
  FactorMask disabled{};
  std::vector<ProtocolResult> full;     // one per tolerance
  std::vector<ProtocolResult> ablated;  // same order
};

// Trains the ablated variant with the full model's seeds and recipe and
// evaluates both on identical users. `full` may be supplied pre-trained.
AblationResult ablate_factors(const TopicWorld& world, std::span<const TopicPair> train_pairs,
                              std::span<const TopicPair> test_pairs, FactorMask disable,
                              const TrainRecipe& recipe,
                              std::span<const ToleranceSpec> tolerances,
                              const ProtocolConfig& eval,
                              const std::optional<GoalWeightModel>& full = std::nullopt);

std::string mask_label(const FactorMask& mask);  // "turn+gcd", "none"
FactorMask parse_mask(std::string_view text);    // inverse; throws ConfigError

struct FactorSeries {
  Factor factor = Factor::kTurn;
  std::vector<double> values;
  std::vector<double> gws;
  Correlation correlation;
};

// (factor value, gw) pairs over every turn that has a goal weight.
std::array<FactorSeries, kFactorCount> factor_correlation(std::span<const EpisodeRecord> records);
// factor value gw
void write_factor_pairs(std::ostream& out, const std::array<FactorSeries, kFactorCount>& series);
// factor pairs r degenerate
void write_factor_summary(std::ostream& out, const std::array<FactorSeries, kFactorCount>& series);

}  // namespace proactive
