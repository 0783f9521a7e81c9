// SPDX-License-Identifier: Apache-2.0
#include "proactive/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "proactive/errors.hpp"

namespace proactive {

namespace {

using json = nlohmann::ordered_json;

using Member = std::variant<int RunConfig::*, double RunConfig::*, std::uint64_t RunConfig::*,
                            bool RunConfig::*, std::string RunConfig::*>;

struct Field {
  const char* key;
  Member member;
};

// Serialization order.
const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"seed", &RunConfig::seed},
      {"node_count", &RunConfig::node_count},
      {"attachment", &RunConfig::attachment},
      {"pair_count", &RunConfig::pair_count},
      {"min_distance", &RunConfig::min_distance},
      {"max_distance", &RunConfig::max_distance},
      {"train_fraction", &RunConfig::train_fraction},
      {"embedding_dim", &RunConfig::embedding_dim},
      {"walks_per_node", &RunConfig::walks_per_node},
      {"walk_length", &RunConfig::walk_length},
      {"window", &RunConfig::window},
      {"negatives", &RunConfig::negatives},
      {"embed_learning_rate", &RunConfig::embed_learning_rate},
      {"embed_epochs", &RunConfig::embed_epochs},
      {"max_turns", &RunConfig::max_turns},
      {"distance_limit", &RunConfig::distance_limit},
      {"d_max", &RunConfig::d_max},
      {"ridge_beta", &RunConfig::ridge_beta},
      {"ridge_max_condition", &RunConfig::ridge_max_condition},
      {"ridge_gd_learning_rate", &RunConfig::ridge_gd_learning_rate},
      {"ridge_gd_iterations", &RunConfig::ridge_gd_iterations},
      {"ridge_gd_tolerance", &RunConfig::ridge_gd_tolerance},
      {"q_c_star", &RunConfig::q_c_star},
      {"q_q_star", &RunConfig::q_q_star},
      {"mention_hops", &RunConfig::mention_hops},
      {"max_mentions", &RunConfig::max_mentions},
      {"max_sample_attempts", &RunConfig::max_sample_attempts},
      {"alpha", &RunConfig::alpha},
      {"lambda", &RunConfig::lambda},
      {"gamma", &RunConfig::gamma},
      {"r_quit", &RunConfig::r_quit},
      {"r_success", &RunConfig::r_success},
      {"r_fail", &RunConfig::r_fail},
      {"printed_goal_sign", &RunConfig::printed_goal_sign},
      {"policy", &RunConfig::policy},
      {"epsilon", &RunConfig::epsilon},
      {"learning_rate", &RunConfig::learning_rate},
      {"batch_size", &RunConfig::batch_size},
      {"memory_size", &RunConfig::memory_size},
      {"epochs", &RunConfig::epochs},
      {"target_sync", &RunConfig::target_sync},
      {"updates_per_episode", &RunConfig::updates_per_episode},
      {"probe_pairs", &RunConfig::probe_pairs},
      {"train_tolerance", &RunConfig::train_tolerance},
      {"gru_hidden", &RunConfig::gru_hidden},
      {"mlp_hidden", &RunConfig::mlp_hidden},
      {"disabled_factors", &RunConfig::disabled_factors},
      {"rounds", &RunConfig::rounds},
      {"tolerances", &RunConfig::tolerances},
      {"policies", &RunConfig::policies},
      {"ablations", &RunConfig::ablations},
      {"write_transcripts", &RunConfig::write_transcripts},
      {"world_dir", &RunConfig::world_dir},
      {"embeddings", &RunConfig::embeddings},
      {"output_dir", &RunConfig::output_dir},
      {"checkpoint", &RunConfig::checkpoint},
      {"host", &RunConfig::host},
      {"port", &RunConfig::port},
  };
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& f : fields())
    if (key == f.key) return &f;
  return nullptr;
}

void assign(RunConfig& cfg, const Field& field, const json& value) {
  const std::string key = field.key;
  auto bad = [&](const char* expected) {
    throw ConfigError("config key '" + key + "' expects " + expected + ", got " + value.dump());
  };
  std::visit(
      [&](auto member) {
        using T = std::remove_reference_t<decltype(cfg.*member)>;
        if constexpr (std::is_same_v<T, bool>) {
          if (!value.is_boolean()) bad("a boolean");
          cfg.*member = value.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (!value.is_string()) bad("a string");
          cfg.*member = value.get<std::string>();
        } else if constexpr (std::is_same_v<T, double>) {
          if (!value.is_number()) bad("a number");
          cfg.*member = value.get<double>();
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          if (!value.is_number_unsigned()) bad("a non-negative integer");
          cfg.*member = value.get<std::uint64_t>();
        } else {
          if (!value.is_number_integer()) bad("an integer");
          const auto v = value.get<std::int64_t>();
          if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
            bad("an integer in range");
          cfg.*member = static_cast<int>(v);
        }
      },
      field.member);
}

template <typename Fn>
void check(const char* key, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void require(bool ok, const char* key, const std::string& rule) {
  if (!ok) throw ConfigError(std::string("config key '") + key + "' " + rule);
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto end = text.find(sep, pos);
    auto token = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty()) out.emplace_back(token);
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  require(node_count >= 10, "node_count", "must be >= 10");
  require(attachment >= 1 && attachment < node_count, "attachment", "must lie in [1, node_count)");
  require(pair_count >= 1, "pair_count", "must be >= 1");
  require(min_distance >= 1, "min_distance", "must be >= 1");
  require(max_distance >= min_distance, "max_distance", "must be >= min_distance");
  require(train_fraction >= 0 && train_fraction <= 1, "train_fraction", "must lie in [0,1]");
  require(embedding_dim >= 1, "embedding_dim", "must be >= 1");
  require(walks_per_node >= 1, "walks_per_node", "must be >= 1");
  require(walk_length >= 2, "walk_length", "must be >= 2");
  require(window >= 1, "window", "must be >= 1");
  require(negatives >= 0, "negatives", "must be >= 0");
  require(embed_learning_rate > 0, "embed_learning_rate", "must be positive");
  require(embed_epochs >= 0, "embed_epochs", "must be >= 0");
  require(max_turns >= 1, "max_turns", "must be >= 1");
  require(distance_limit >= 2 && distance_limit % 2 == 0, "distance_limit",
          "must be a positive even integer");
  require(d_max > distance_limit, "d_max", "must exceed distance_limit");
  require(ridge_beta >= 0, "ridge_beta", "must be non-negative");
  require(ridge_max_condition > 1, "ridge_max_condition", "must exceed 1");
  require(ridge_gd_learning_rate > 0, "ridge_gd_learning_rate", "must be positive");
  require(ridge_gd_iterations >= 1, "ridge_gd_iterations", "must be >= 1");
  require(ridge_gd_tolerance >= 0, "ridge_gd_tolerance", "must be non-negative");
  require(q_c_star > 0 && q_c_star <= 1, "q_c_star", "must lie in (0,1]");
  require(q_q_star >= 0 && q_q_star < q_c_star, "q_q_star", "must lie in [0, q_c_star)");
  require(mention_hops >= 1, "mention_hops", "must be >= 1");
  require(max_mentions >= 1, "max_mentions", "must be >= 1");
  require(max_sample_attempts >= 1, "max_sample_attempts", "must be >= 1");
  require(std::isfinite(alpha), "alpha", "must be finite");
  require(lambda >= 0, "lambda", "must be non-negative");
  require(gamma > 0 && gamma < 1, "gamma", "must lie in (0,1)");
  check("policy", [&] { policy_type_from_name(policy); });
  require(epsilon >= 0 && epsilon <= 1, "epsilon", "must lie in [0,1]");
  require(learning_rate > 0, "learning_rate", "must be positive");
  require(batch_size >= 1, "batch_size", "must be >= 1");
  require(memory_size >= batch_size, "memory_size", "must be >= batch_size");
  require(epochs >= 0, "epochs", "must be >= 0");
  require(target_sync >= 1, "target_sync", "must be >= 1");
  require(updates_per_episode >= 0, "updates_per_episode", "must be >= 0");
  require(probe_pairs >= 0, "probe_pairs", "must be >= 0");
  check("train_tolerance", [&] { ToleranceSpec::parse(train_tolerance); });
  require(gru_hidden >= 1, "gru_hidden", "must be >= 1");
  require(mlp_hidden >= 1, "mlp_hidden", "must be >= 1");
  check("disabled_factors", [&] { parse_mask(disabled_factors); });
  require(rounds >= 1, "rounds", "must be >= 1");
  check("tolerances", [&] { require(!tolerance_list().empty(), "tolerances", "is empty"); });
  check("policies", [&] { require(!policy_list().empty(), "policies", "is empty"); });
  check("ablations", [&] { ablation_list(); });
  require(!world_dir.empty(), "world_dir", "must not be empty");
  require(!output_dir.empty(), "output_dir", "must not be empty");
  require(port >= 0 && port <= 65535, "port", "must lie in [0, 65535]");
}

SyntheticWorldSpec RunConfig::world_spec() const {
  SyntheticWorldSpec s;
  s.node_count = node_count;
  s.attachment = attachment;
  s.seed = derive_seed(seed, {101});
  s.pair_count = pair_count;
  s.min_distance = min_distance;
  s.max_distance = max_distance;
  s.train_fraction = train_fraction;
  return s;
}

WalkParams RunConfig::walk_params() const {
  WalkParams w;
  w.walks_per_node = walks_per_node;
  w.walk_length = walk_length;
  w.window = window;
  w.negatives = negatives;
  w.learning_rate = embed_learning_rate;
  w.epochs = embed_epochs;
  w.seed = derive_seed(seed, {102});
  return w;
}

AgentConfig RunConfig::agent_config() const {
  AgentConfig a;
  a.max_turns = max_turns;
  a.distance.limit = distance_limit;
  a.distance.d_max = d_max;
  a.ridge.beta = ridge_beta;
  a.ridge.max_condition = ridge_max_condition;
  a.ridge.gd_learning_rate = ridge_gd_learning_rate;
  a.ridge.gd_iterations = ridge_gd_iterations;
  a.ridge.gd_tolerance = ridge_gd_tolerance;
  return a;
}

SimulatorConfig RunConfig::simulator_config() const {
  return {q_c_star, q_q_star, mention_hops, max_mentions, max_sample_attempts};
}

RewardConfig RunConfig::reward_config() const {
  RewardConfig r;
  r.alpha = alpha;
  r.lambda_decay = lambda;
  r.gamma = gamma;
  r.r_quit = r_quit;
  r.r_success = r_success;
  r.r_fail = r_fail;
  r.printed_goal_sign = printed_goal_sign;
  return r;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.epsilon = epsilon;
  t.learning_rate = learning_rate;
  t.batch_size = static_cast<std::size_t>(batch_size);
  t.memory_capacity = static_cast<std::size_t>(memory_size);
  t.epochs = epochs;
  t.target_sync_interval = target_sync;
  t.updates_per_episode = updates_per_episode;
  t.probe_pairs = static_cast<std::size_t>(probe_pairs);
  t.tolerance = ToleranceSpec::parse(train_tolerance);
  t.seed = derive_seed(seed, {103});
  return t;
}

TrainRecipe RunConfig::train_recipe() const {
  TrainRecipe r;
  r.type = policy_type_from_name(policy);
  r.dims = {gru_hidden, mlp_hidden};
  r.disabled = parse_mask(disabled_factors);
  r.simulator = simulator_config();
  r.reward = reward_config();
  r.train = train_config();
  return r;
}

ProtocolConfig RunConfig::protocol_config() const {
  ProtocolConfig p;
  p.rounds = rounds;
  p.seed = derive_seed(seed, {104});
  p.simulator = simulator_config();
  p.reward = reward_config();
  return p;
}

std::vector<ToleranceSpec> RunConfig::tolerance_list() const {
  std::vector<ToleranceSpec> out;
  for (const auto& t : split(tolerances, ',')) out.push_back(ToleranceSpec::parse(t));
  return out;
}

std::vector<PolicyType> RunConfig::policy_list() const {
  std::vector<PolicyType> out;
  for (const auto& p : split(policies, ',')) out.push_back(policy_type_from_name(p));
  return out;
}

std::vector<FactorMask> RunConfig::ablation_list() const {
  std::vector<FactorMask> out;
  for (const auto& a : split(ablations, ',')) {
    const auto m = parse_mask(a);
    bool any = false;
    for (bool b : m) any = any || b;
    if (!any) throw ConfigError("an ablation must disable at least one factor");
    out.push_back(m);
  }
  return out;
}

std::filesystem::path RunConfig::triples_path() const {
  return std::filesystem::path(world_dir) / "triples.tsv";
}
std::filesystem::path RunConfig::train_pairs_path() const {
  return std::filesystem::path(world_dir) / "train_pairs.tsv";
}
std::filesystem::path RunConfig::test_pairs_path() const {
  return std::filesystem::path(world_dir) / "test_pairs.tsv";
}
std::filesystem::path RunConfig::embeddings_path() const {
  if (!embeddings.empty()) return embeddings;
  return std::filesystem::path(world_dir) / "embeddings.tsv";
}
std::filesystem::path RunConfig::checkpoint_path(std::string_view policy_name) const {
  if (!checkpoint.empty() && policy_name == policy) return checkpoint;
  return std::filesystem::path(output_dir) / (std::string(policy_name) + "_checkpoint.json");
}

RunConfig preset(std::string_view name) {
  RunConfig cfg;
  if (name == "paper") return cfg;
  if (name == "desk") {
    cfg.node_count = 300;
    cfg.learning_rate = 1e-3;
    cfg.epochs = 10;
    return cfg;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected paper or desk)");
}

std::string config_to_json(const RunConfig& cfg) {
  json j = json::object();
  for (const auto& f : fields())
    std::visit([&](auto member) { j[f.key] = cfg.*member; }, f.member);
  return j.dump(2) + "\n";
}

RunConfig config_from_json(std::string_view text, RunConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const Field* f = find_field(key);
    if (!f) throw ConfigError("unknown config key '" + key + "'");
    assign(base, *f, value);
  }
  return base;
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("override must look like key=value: " + std::string(assignment));
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  const Field* f = find_field(key);
  if (!f) throw ConfigError("unknown config key '" + key + "'");
  json value;
  if (std::holds_alternative<std::string RunConfig::*>(f->member)) {
    value = raw;
  } else {
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;
    }
  }
  assign(cfg, *f, value);
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str(), std::move(base));
}

}  // namespace proactive
