// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "proactive/agent.hpp"
#include "proactive/embeddings.hpp"
#include "proactive/evaluation.hpp"
#include "proactive/simulator.hpp"
#include "proactive/trainer.hpp"
#include "proactive/world_gen.hpp"

namespace proactive {

// Every tunable of a run, serialized as one flat JSON object. Defaults are
// the full-scale values; the desk preset shortens training.
struct RunConfig {
  std::uint64_t seed = 7;

  // synthetic world
  int node_count = 300;
  int attachment = 2;
  int pair_count = 500;
  int min_distance = 2;
  int max_distance = 6;
  double train_fraction = 0.8;

  // embeddings
  int embedding_dim = 50;
  int walks_per_node = 10;
  int walk_length = 20;
  int window = 3;
  int negatives = 5;
  double embed_learning_rate = 0.025;
  int embed_epochs = 3;

  // agent
  int max_turns = 20;
  int distance_limit = 6;
  double d_max = 7.0;
  double ridge_beta = 0.01;
  double ridge_max_condition = 1e12;
  double ridge_gd_learning_rate = 0.05;
  int ridge_gd_iterations = 500;
  double ridge_gd_tolerance = 1e-8;

  // simulator
  double q_c_star = 0.5;
  double q_q_star = 0.4;
  int mention_hops = 3;
  int max_mentions = 3;
  int max_sample_attempts = 20;

  // reward
  double alpha = 100.0;
  double lambda = 0.02;
  double gamma = 0.9;
  double r_quit = -10.0;
  double r_success = 20.0;
  double r_fail = -10.0;
  bool printed_goal_sign = false;

  // training
  std::string policy = "proi";
  double epsilon = 0.2;
  double learning_rate = 1e-7;
  int batch_size = 100;
  int memory_size = 2000;
  int epochs = 100;
  int target_sync = 50;
  int updates_per_episode = 1;
  int probe_pairs = 20;
  std::string train_tolerance = "mixed";
  int gru_hidden = 16;
  int mlp_hidden = 32;
  std::string disabled_factors = "none";

  // evaluation
  int rounds = 100;
  std::string tolerances = "0.8,1.0,1.2,mixed";
  std::string policies = "random,pop_gcr,pop_us,degrade,proi";
  std::string ablations = "turn+gcd,eus+cd";
  bool write_transcripts = true;

  // files
  std::string world_dir = "world";
  std::string embeddings = "";  // default <world_dir>/embeddings.tsv
  std::string output_dir = "out";
  std::string checkpoint = "";  // default <output_dir>/<policy>_checkpoint.json

  // service
  std::string host = "127.0.0.1";
  int port = 8080;

  void validate() const;

  SyntheticWorldSpec world_spec() const;
  WalkParams walk_params() const;
  AgentConfig agent_config() const;
  SimulatorConfig simulator_config() const;
  RewardConfig reward_config() const;
  TrainConfig train_config() const;
  TrainRecipe train_recipe() const;
  ProtocolConfig protocol_config() const;
  std::vector<ToleranceSpec> tolerance_list() const;
  std::vector<PolicyType> policy_list() const;
  std::vector<FactorMask> ablation_list() const;

  std::filesystem::path triples_path() const;
  std::filesystem::path train_pairs_path() const;
  std::filesystem::path test_pairs_path() const;
  std::filesystem::path embeddings_path() const;
  std::filesystem::path checkpoint_path(std::string_view policy_name) const;
};

RunConfig preset(std::string_view name);  // "paper" | "desk"

std::string config_to_json(const RunConfig& cfg);
// Keys absent from `text` keep their value in `base`.
RunConfig config_from_json(std::string_view text, RunConfig base = {});
// One `key=value` override; the value is read as JSON when it parses, else
// as a string.
void apply_override(RunConfig& cfg, std::string_view assignment);

RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace proactive
