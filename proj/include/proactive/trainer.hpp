// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "proactive/agent.hpp"
#include "proactive/episode.hpp"
#include "proactive/goal_weight_net.hpp"
#include "proactive/policy.hpp"
#include "proactive/simulator.hpp"

namespace proactive {

struct RewardConfig {
  double alpha = 100.0;
  double lambda_decay = 0.02;
  double gamma = 0.9;
  double r_quit = -10.0;
  double r_success = 20.0;
  double r_fail = -10.0;
  // The literal printed goal term, e^{-lambda t}(d_t - d_{t-1}), which
  // rewards moving away from the goal. Off by default.
  bool printed_goal_sign = false;

  void validate() const;
};

enum class RewardEvent { kNone, kQuit, kSuccess, kFail };

struct RewardPoint {
  double us = 0.0;
  double d = 0.0;
};

struct RewardTerms {
  double us = 0.0;
  double quit = 0.0;
  double goal = 0.0;
  double success = 0.0;
  double fail = 0.0;
  double total() const noexcept { return us + quit + goal + success + fail; }
};

RewardTerms reward_terms(RewardPoint prev, RewardPoint cur, int turn, RewardEvent event,
                         const RewardConfig& cfg);
double step_reward(RewardPoint prev, RewardPoint cur, int turn, RewardEvent event,
                   const RewardConfig& cfg);

// A state as the learner sees it: net inputs plus the (constant) ranks of
// every candidate.
struct StateFeatures {
  StateInputs inputs;
  std::vector<TopicId> topics;
  std::vector<int> rank_d;
  std::vector<int> rank_p;

  static StateFeatures from(const DecisionState& state);
  std::size_t size() const noexcept { return topics.size(); }
};

struct Transition {
  StateFeatures state;
  std::size_t action = 0;  // index into state.topics
  double reward = 0.0;
  std::optional<StateFeatures> next;  // empty when terminal
  bool terminal() const noexcept { return !next.has_value(); }
};

class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity = 2000);

  void push(Transition t);
  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  // Oldest first.
  std::vector<const Transition*> contents() const;
  // Uniform with replacement.
  std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  std::vector<Transition> items_;
};

// Blended rank score of `action` with the goal weight the model assigns to `state`.
double q_value(const GoalWeightModel& model, const StateFeatures& state, std::size_t action);
double q_value_for_gw(const StateFeatures& state, std::size_t action, double gw);
// Index of `topic` among the candidates; throws ContractError if absent.
std::size_t action_index(const StateFeatures& state, TopicId topic);

using TargetQ = std::function<double(const StateFeatures&, std::size_t)>;

double bellman_target(const Transition& t, const TargetQ& target_q, const RewardConfig& cfg);
double max_q(const StateFeatures& state, const TargetQ& q);

// Mean squared residual of the batch; when `grad` is non-empty the gradient
// w.r.t. the model parameters is written into it.
double batch_loss(const GoalWeightModel& model, std::span<const Transition* const> batch,
                  std::span<const double> targets, std::span<double> grad);

class Adam {
 public:
  explicit Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);
  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

// Tolerance of simulated users: a fixed k, or fresh draws from {0.8, 1.0, 1.2}.
struct ToleranceSpec {
  std::optional<double> k;  // empty = mixed

  static ToleranceSpec fixed(double k) { return {k}; }
  static ToleranceSpec mixed() { return {}; }
  std::string label() const;
  static ToleranceSpec parse(std::string_view text);  // "0.8", "mixed"
};

// The user vector depends only on `seed`; under the mixed spec the
// tolerance is derived from it as well.
UserProfile profile_for(const ToleranceSpec& spec, const EmbeddingTable& embeddings,
                        std::uint64_t seed, const SimulatorConfig& cfg);

struct EpisodeResult {
  EpisodeRecord record;
  std::vector<Transition> transitions;
};

struct EpisodeOptions {
  double epsilon = 0.0;
  bool collect = false;
};

// One dialogue between `policy` and the simulated user. `policy_rng` drives
// selection and exploration, `user_rng` the simulator.
EpisodeResult run_episode(const TopicWorld& world, const Policy& policy,
                          const UserProfile& profile, TopicId start, TopicId goal,
                          const SimulatorConfig& sim, const RewardConfig& reward,
                          Rng& policy_rng, Rng& user_rng, EpisodeOptions opt = {});

// Seeded episode streams so that different policies meet identical users.
struct EpisodeSeeds {
  std::uint64_t profile = 0;
  std::uint64_t policy = 0;
  std::uint64_t user = 0;
};
EpisodeSeeds episode_seeds(std::uint64_t master, std::uint64_t round, std::uint64_t pair);

struct TrainConfig {
  double epsilon = 0.2;
  double learning_rate = 1e-3;
  std::size_t batch_size = 100;
  std::size_t memory_capacity = 2000;
  int epochs = 10;
  int target_sync_interval = 50;
  int updates_per_episode = 1;
  std::size_t probe_pairs = 20;
  ToleranceSpec tolerance = ToleranceSpec::mixed();
  std::uint64_t seed = 7;

  void validate() const;
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;  // mean over updates; NaN if none ran
  double mean_reward = 0.0;
  double probe_gcr = 0.0;
  double probe_us = 0.0;
};

void write_training_log(std::ostream& out, std::span<const EpochLog> rows);

class DqnTrainer {
 public:
  DqnTrainer(const TopicWorld& world, GoalWeightModel model, PolicyType type,
             SimulatorConfig sim, RewardConfig reward, TrainConfig cfg);

  const GoalWeightModel& model() const noexcept { return model_; }
  const GoalWeightModel& target() const noexcept { return target_; }
  long step_count() const noexcept { return steps_; }
  ReplayMemory& memory() noexcept { return memory_; }

  // One update from a uniform batch; nullopt when memory is too small.
  std::optional<double> train_step();
  // Full schedule; returns one log row per epoch.
  std::vector<EpochLog> train(std::span<const std::pair<TopicId, TopicId>> pairs);

  // Greedy evaluation of the current model on fixed probe users.
  std::pair<double, double> probe(std::span<const std::pair<TopicId, TopicId>> pairs) const;

 private:
  Policy current_policy() const;

  const TopicWorld* world_;
  GoalWeightModel model_;
  GoalWeightModel target_;
  PolicyType type_;
  SimulatorConfig sim_;
  RewardConfig reward_;
  TrainConfig cfg_;
  ReplayMemory memory_;
  Adam adam_;
  Rng rng_;
  long steps_ = 0;
};

}  // namespace proactive
