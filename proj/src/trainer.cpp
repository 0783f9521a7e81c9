// SPDX-License-Identifier: Apache-2.0
#include "proactive/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "proactive/errors.hpp"
#include "proactive/metrics.hpp"

namespace proactive {

namespace {

constexpr std::uint64_t kProfileStream = 1;
constexpr std::uint64_t kPolicyStream = 2;
constexpr std::uint64_t kUserStream = 3;
constexpr std::uint64_t kToleranceStream = 4;
constexpr std::uint64_t kTrainStream = 11;
constexpr std::uint64_t kProbeStream = 12;
constexpr std::uint64_t kSampleStream = 13;
constexpr std::uint64_t kShuffleStream = 14;

}  // namespace

void RewardConfig::validate() const {
  if (!(gamma > 0 && gamma < 1)) throw ConfigError("gamma must lie in (0,1)");
  if (!(lambda_decay >= 0)) throw ConfigError("lambda must be non-negative");
  if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
}

RewardTerms reward_terms(RewardPoint prev, RewardPoint cur, int turn, RewardEvent event,
                         const RewardConfig& cfg) {
  RewardTerms r;
  r.us = cfg.alpha * (cur.us - prev.us);
  const double decay = std::exp(-cfg.lambda_decay * turn);
  r.goal = cfg.printed_goal_sign ? decay * (cur.d - prev.d) : decay * (prev.d - cur.d);
  switch (event) {
    case RewardEvent::kNone:
      break;
    case RewardEvent::kQuit:
      r.quit = cfg.r_quit;
      break;
    case RewardEvent::kSuccess:
      r.success = cfg.r_success;
      break;
    case RewardEvent::kFail:
      r.fail = cfg.r_fail;
      break;
  }
  return r;
}

double step_reward(RewardPoint prev, RewardPoint cur, int turn, RewardEvent event,
                   const RewardConfig& cfg) {
  return reward_terms(prev, cur, turn, event, cfg).total();
}

StateFeatures StateFeatures::from(const DecisionState& state) {
  StateFeatures f;
  f.inputs = state.inputs;
  const auto scores = score_candidates(state.candidates, 0.5);
  f.topics.reserve(scores.size());
  for (const auto& s : scores) {
    f.topics.push_back(s.topic);
    f.rank_d.push_back(s.rank_d);
    f.rank_p.push_back(s.rank_p);
  }
  return f;
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("memory_size must be positive");
  items_.reserve(capacity);
}

void ReplayMemory::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayMemory::contents() const {
  std::vector<const Transition*> out;
  out.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i)
    out.push_back(&items_[(head_ + i) % items_.size()]);
  return out;
}

std::vector<const Transition*> ReplayMemory::sample(std::size_t n, Rng& rng) const {
  if (items_.empty()) throw ContractError("sampling from empty replay memory");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<const Transition*> out(n);
  for (auto& p : out) p = &items_[pick(rng)];
  return out;
}

double q_value_for_gw(const StateFeatures& state, std::size_t action, double gw) {
  if (action >= state.size()) throw ContractError("action is not a candidate of the state");
  return gw * state.rank_d[action] + (1.0 - gw) * state.rank_p[action];
}

double q_value(const GoalWeightModel& model, const StateFeatures& state, std::size_t action) {
  return q_value_for_gw(state, action, model.forward(state.inputs).gw);
}

std::size_t action_index(const StateFeatures& state, TopicId topic) {
  const auto it = std::find(state.topics.begin(), state.topics.end(), topic);
  if (it == state.topics.end()) throw ContractError("action is not a candidate of the state");
  return static_cast<std::size_t>(it - state.topics.begin());
}

double max_q(const StateFeatures& state, const TargetQ& q) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < state.size(); ++a) best = std::max(best, q(state, a));
  return state.size() == 0 ? 0.0 : best;
}

double bellman_target(const Transition& t, const TargetQ& target_q, const RewardConfig& cfg) {
  if (t.terminal()) return t.reward;
  return t.reward + cfg.gamma * max_q(*t.next, target_q);
}

double batch_loss(const GoalWeightModel& model, std::span<const Transition* const> batch,
                  std::span<const double> targets, std::span<double> grad) {
  if (batch.size() != targets.size()) throw InputError("batch and targets differ in length");
  if (batch.empty()) return 0.0;
  std::fill(grad.begin(), grad.end(), 0.0);
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& t = *batch[i];
    const auto trace = model.forward(t.state.inputs);
    const double residual = targets[i] - q_value_for_gw(t.state, t.action, trace.gw);
    loss += residual * residual;
    if (!grad.empty()) {
      const double dq_dgw = t.state.rank_d[t.action] - t.state.rank_p[t.action];
      model.backward(trace, -2.0 * residual * dq_dgw / n, grad);
    }
  }
  return loss / n;
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw ShapeError("optimizer state does not match parameter count");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

std::string ToleranceSpec::label() const {
  if (!k) return "mixed";
  std::ostringstream s;
  s << *k;
  auto text = s.str();
  if (text.find_first_of(".e") == std::string::npos) text += ".0";
  return text;
}

ToleranceSpec ToleranceSpec::parse(std::string_view text) {
  if (text == "mixed") return mixed();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(v > 0))
    throw ConfigError("tolerance must be a positive number or 'mixed': " + std::string(text));
  return fixed(v);
}

UserProfile profile_for(const ToleranceSpec& spec, const EmbeddingTable& embeddings,
                        std::uint64_t seed, const SimulatorConfig& cfg) {
  double k = 0.0;
  if (spec.k) {
    k = *spec.k;
  } else {
    k = MixedProfileSource::kTolerances[derive_seed(seed, {kToleranceStream}) % 3];
  }
  return sample_profile(embeddings, k, seed, cfg);
}

EpisodeSeeds episode_seeds(std::uint64_t master, std::uint64_t round, std::uint64_t pair) {
  return {derive_seed(master, {round, pair, kProfileStream}),
          derive_seed(master, {round, pair, kPolicyStream}),
          derive_seed(master, {round, pair, kUserStream})};
}

EpisodeResult run_episode(const TopicWorld& world, const Policy& policy,
                          const UserProfile& profile, TopicId start, TopicId goal,
                          const SimulatorConfig& sim, const RewardConfig& reward,
                          Rng& policy_rng, Rng& user_rng, EpisodeOptions opt) {
  const auto& graph = world.graph();
  if (start == goal) throw InputError("start and goal must differ");
  if (!graph.contains(start) || !graph.contains(goal))
    throw LookupError("start or goal topic is not in the graph");

  EpisodeResult out;
  auto& rec = out.record;
  rec.start = start;
  rec.goal = goal;
  rec.tolerance = profile.tolerance;

  DialogueHistory history(start, goal, world.config().max_turns);
  RewardPoint prev{kColdStartPreference, world.distance().goal_difficulty(start, goal)};
  AgentView view = observe(world, history);
  if (view.state.candidates.empty()) {
    history.end_as_failure();
    rec.outcome = history.outcome();
    return out;
  }

  for (int t = 1;; ++t) {
    const Decision dec = select_topic(policy, view.state, policy_rng, opt.epsilon);
    TurnRecord tr;
    tr.turn = t;
    tr.agent_topic = dec.topic;
    tr.agent_preference = profile.preference(dec.topic);
    tr.gw = dec.gw;
    tr.factors = dec.factors;
    tr.est_distance = view.state.candidates[dec.index].est_distance;
    tr.explored = dec.explored;

    std::optional<StateFeatures> features;
    if (opt.collect) features = StateFeatures::from(view.state);

    history.add_agent_topic(dec.topic);
    RewardEvent event = RewardEvent::kNone;
    RewardPoint cur;
    std::optional<AgentView> next;
    if (history.outcome() == Outcome::kSuccess) {
      cur = {satisfaction(profile, history, std::nullopt), 0.0};
      event = RewardEvent::kSuccess;
    } else {
      UserResponse resp = respond(profile, graph, history, dec.topic, sim, user_rng);
      tr.response = resp;
      history.add_response(std::move(resp));
      cur.us = satisfaction(profile, history, std::nullopt);
      const auto anchors = history.anchors();
      cur.d = current_goal_distance(world, anchors, goal);
      if (history.outcome() == Outcome::kQuit) {
        event = RewardEvent::kQuit;
      } else if (history.outcome() == Outcome::kTimeout) {
        event = RewardEvent::kFail;
      } else {
        next = observe(world, history);
        if (next->state.candidates.empty()) {
          history.end_as_failure();
          event = RewardEvent::kFail;
          next.reset();
        }
      }
    }
    tr.us = cur.us;
    const double r = step_reward(prev, cur, t, event, reward);
    rec.total_reward += r;
    if (opt.collect) {
      Transition tx;
      tx.state = std::move(*features);
      tx.action = dec.index;
      tx.reward = r;
      if (next) tx.next = StateFeatures::from(next->state);
      out.transitions.push_back(std::move(tx));
    }
    rec.turns.push_back(std::move(tr));
    prev = cur;
    if (event != RewardEvent::kNone) break;
    view = std::move(*next);
  }
  rec.outcome = history.outcome();
  rec.final_us = satisfaction(profile, history, std::nullopt);
  return out;
}

void TrainConfig::validate() const {
  if (!(epsilon >= 0 && epsilon <= 1)) throw ConfigError("epsilon must lie in [0,1]");
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (memory_capacity == 0) throw ConfigError("memory_size must be positive");
  if (batch_size > memory_capacity) throw ConfigError("batch_size must not exceed memory_size");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (target_sync_interval < 1) throw ConfigError("target_sync must be >= 1");
  if (updates_per_episode < 0) throw ConfigError("updates_per_episode must be non-negative");
}

void write_training_log(std::ostream& out, std::span<const EpochLog> rows) {
  out << "epoch\tloss\tmean_reward\tprobe_gcr\tprobe_us\n";
  const auto old = out.precision(10);
  for (const auto& r : rows)
    out << r.epoch << '\t' << r.loss << '\t' << r.mean_reward << '\t' << r.probe_gcr << '\t'
        << r.probe_us << '\n';
  out.precision(old);
}

DqnTrainer::DqnTrainer(const TopicWorld& world, GoalWeightModel model, PolicyType type,
                       SimulatorConfig sim, RewardConfig reward, TrainConfig cfg)
    : world_(&world),
      model_(std::move(model)),
      target_(model_),
      type_(type),
      sim_(sim),
      reward_(reward),
      cfg_(cfg),
      memory_(cfg.memory_capacity),
      adam_(model_.params().size(), cfg.learning_rate),
      rng_(derive_seed(cfg.seed, {kSampleStream})) {
  cfg_.validate();
  sim_.validate();
  reward_.validate();
  const bool kind_ok = (type == PolicyType::kProi && model_.kind() == GoalWeightModel::Kind::kProi) ||
                       (type == PolicyType::kDegrade &&
                        model_.kind() == GoalWeightModel::Kind::kDegrade);
  if (!kind_ok) throw ConfigError("policy type does not match the model kind");
}

Policy DqnTrainer::current_policy() const {
  Policy p;
  p.type = type_;
  // Non-owning: the trainer outlives every episode it runs.
  p.model = std::shared_ptr<const GoalWeightModel>(std::shared_ptr<void>{}, &model_);
  return p;
}

std::optional<double> DqnTrainer::train_step() {
  if (memory_.size() < cfg_.batch_size) return std::nullopt;
  const auto batch = memory_.sample(cfg_.batch_size, rng_);

  // The goal weight is a per-state quantity, so one target forward pass
  // covers every candidate of a next state.
  const StateFeatures* cached = nullptr;
  double cached_gw = 0.0;
  const TargetQ target_q = [&](const StateFeatures& s, std::size_t a) {
    if (&s != cached) {
      cached = &s;
      cached_gw = target_.forward(s.inputs).gw;
    }
    return q_value_for_gw(s, a, cached_gw);
  };
  std::vector<double> targets(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    targets[i] = bellman_target(*batch[i], target_q, reward_);

  std::vector<double> grad(model_.params().size(), 0.0);
  const double loss = batch_loss(model_, batch, targets, grad);
  adam_.step(model_.params(), grad);
  ++steps_;
  if (steps_ % cfg_.target_sync_interval == 0) target_ = model_;
  return loss;
}

std::pair<double, double> DqnTrainer::probe(
    std::span<const std::pair<TopicId, TopicId>> pairs) const {
  const auto policy = current_policy();
  const auto master = derive_seed(cfg_.seed, {kProbeStream});
  std::vector<EpisodeRecord> records;
  records.reserve(pairs.size());
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const auto seeds = episode_seeds(master, 0, j);
    const auto profile = profile_for(cfg_.tolerance, world_->embeddings(), seeds.profile, sim_);
    Rng prng(seeds.policy), urng(seeds.user);
    records.push_back(run_episode(*world_, policy, profile, pairs[j].first, pairs[j].second,
                                  sim_, reward_, prng, urng)
                          .record);
  }
  if (records.empty()) return {0.0, 0.0};
  return {gcr(records, reward_.lambda_decay), us_metric(records)};
}

std::vector<EpochLog> DqnTrainer::train(std::span<const std::pair<TopicId, TopicId>> pairs) {
  if (pairs.empty()) throw ConfigError("training dataset has no start-goal pairs");
  const auto probe_set = pairs.first(std::min(cfg_.probe_pairs, pairs.size()));
  const auto master = derive_seed(cfg_.seed, {kTrainStream});
  Rng shuffle_rng(derive_seed(cfg_.seed, {kShuffleStream}));
  const auto policy = current_policy();

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<EpochLog> log;
  for (int epoch = 1; epoch <= cfg_.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0, reward_sum = 0.0;
    int updates = 0;
    for (std::size_t i : order) {
      const auto seeds = episode_seeds(master, static_cast<std::uint64_t>(epoch), i);
      const auto profile = profile_for(cfg_.tolerance, world_->embeddings(), seeds.profile, sim_);
      Rng prng(seeds.policy), urng(seeds.user);
      auto result = run_episode(*world_, policy, profile, pairs[i].first, pairs[i].second, sim_,
                                reward_, prng, urng, {cfg_.epsilon, true});
      reward_sum += result.record.total_reward;
      for (auto& t : result.transitions) memory_.push(std::move(t));
      for (int u = 0; u < cfg_.updates_per_episode; ++u) {
        if (auto loss = train_step()) {
          loss_sum += *loss;
          ++updates;
        }
      }
    }
    EpochLog row;
    row.epoch = epoch;
    row.loss = updates > 0 ? loss_sum / updates : std::numeric_limits<double>::quiet_NaN();
    row.mean_reward = reward_sum / static_cast<double>(pairs.size());
    std::tie(row.probe_gcr, row.probe_us) = probe(probe_set);
    log.push_back(row);
  }
  return log;
}

}  // namespace proactive
