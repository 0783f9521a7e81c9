// SPDX-License-Identifier: Apache-2.0
// Command-line front door: world generation, embedding, training,
// evaluation and the session server.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "proactive/checkpoint.hpp"
#include "proactive/config.hpp"
#include "proactive/errors.hpp"
#include "proactive/session_service.hpp"

namespace fs = std::filesystem;
using namespace proactive;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read " + path.string());
  return f;
}

void log_config(const RunConfig& cfg, const fs::path& dir) {
  auto f = open_out(dir / "resolved_config.json");
  f << config_to_json(cfg);
}

struct LoadedWorld {
  KnowledgeGraph graph;
  EmbeddingTable embeddings;
  std::vector<TopicPair> train_pairs;
  std::vector<TopicPair> test_pairs;
};

KnowledgeGraph load_graph(const RunConfig& cfg) {
  auto in = open_in(cfg.triples_path());
  return load_triples(in);
}

LoadedWorld load_world(const RunConfig& cfg) {
  LoadedWorld w{load_graph(cfg), {}, {}, {}};
  {
    auto in = open_in(cfg.embeddings_path());
    w.embeddings = load_embeddings(in, w.graph);
  }
  if (fs::exists(cfg.train_pairs_path())) {
    auto in = open_in(cfg.train_pairs_path());
    w.train_pairs = load_pairs(in, w.graph);
  }
  if (fs::exists(cfg.test_pairs_path())) {
    auto in = open_in(cfg.test_pairs_path());
    w.test_pairs = load_pairs(in, w.graph);
  }
  return w;
}

Policy load_policy(const RunConfig& cfg, PolicyType type) {
  if (type != PolicyType::kProi && type != PolicyType::kDegrade) return Policy::baseline(type);
  const auto kind =
      type == PolicyType::kProi ? GoalWeightModel::Kind::kProi : GoalWeightModel::Kind::kDegrade;
  auto ckpt = load_checkpoint(cfg.checkpoint_path(policy_type_name(type)), kind);
  Policy p;
  p.type = type;
  p.model = std::make_shared<const GoalWeightModel>(std::move(ckpt.model));
  return p;
}

int cmd_gen_world(const RunConfig& cfg) {
  const auto world = generate_world(cfg.world_spec());
  write_world(cfg.world_dir, world);
  log_config(cfg, cfg.world_dir);
  std::cout << "wrote " << world.graph.topic_count() << " topics, " << world.graph.edge_count()
            << " edges, " << world.train_pairs.size() << " train / " << world.test_pairs.size()
            << " test pairs to " << cfg.world_dir << "\n";
  return kExitOk;
}

int cmd_embed(const RunConfig& cfg) {
  const auto graph = load_graph(cfg);
  const auto table = train_embeddings(graph, cfg.embedding_dim, cfg.walk_params());
  auto out = open_out(cfg.embeddings_path());
  write_embeddings(table, graph, out);
  log_config(cfg, cfg.world_dir);
  std::cout << "wrote " << table.rows() << "x" << table.dim() << " embeddings to "
            << cfg.embeddings_path().string() << "\n";
  return kExitOk;
}

int cmd_train(const RunConfig& cfg) {
  const auto w = load_world(cfg);
  if (w.train_pairs.empty()) throw ConfigError("no training pairs in " + cfg.train_pairs_path().string());
  const TopicWorld world(w.graph, w.embeddings, cfg.agent_config());
  const auto recipe = cfg.train_recipe();
  const auto trained = train_model(world, w.train_pairs, recipe);
  const auto path = cfg.checkpoint_path(cfg.policy);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_checkpoint({trained.model, static_cast<std::uint64_t>(trained.step_count)}, path);
  {
    auto log = open_out(fs::path(cfg.output_dir) / (cfg.policy + "_training_log.tsv"));
    write_training_log(log, trained.log);
  }
  log_config(cfg, cfg.output_dir);
  std::cout << "trained " << cfg.policy << " for " << cfg.epochs << " epochs ("
            << trained.step_count << " updates); checkpoint " << path.string() << "\n";
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg) {
  const auto w = load_world(cfg);
  if (w.test_pairs.empty()) throw ConfigError("no test pairs in " + cfg.test_pairs_path().string());
  const TopicWorld world(w.graph, w.embeddings, cfg.agent_config());
  const auto pcfg = cfg.protocol_config();
  const fs::path dir = cfg.output_dir;

  auto results = open_out(dir / "results.tsv");
  write_results_header(results);
  std::ofstream transcripts;
  if (cfg.write_transcripts) transcripts = open_out(dir / "transcripts.jsonl");
  std::vector<EpisodeRecord> proi_records;

  for (const auto type : cfg.policy_list()) {
    const auto policy = load_policy(cfg, type);
    for (const auto& k : cfg.tolerance_list()) {
      const std::string label = std::string(policy.name()) + "@" + k.label();
      const auto res = run_protocol(world, policy, w.test_pairs, k, pcfg,
                                    [&](int round, std::size_t, const EpisodeRecord& rec) {
                                      if (cfg.write_transcripts)
                                        write_transcript_line(transcripts, rec, w.graph, label, round);
                                      if (type == PolicyType::kProi) proi_records.push_back(rec);
                                    });
      write_results_row(results, res);
      std::cout << policy.name() << " k=" << k.label() << " gcr=" << res.metrics.reported.gcr
                << " us=" << res.metrics.reported.us << "\n";
    }
  }
  if (!proi_records.empty()) {
    try {
      const auto series = factor_correlation(proi_records);
      auto pairs = open_out(dir / "factor_pairs.tsv");
      write_factor_pairs(pairs, series);
      auto summary = open_out(dir / "factor_summary.tsv");
      write_factor_summary(summary, series);
    } catch (const MetricUndefinedError& e) {
      std::cerr << "factor correlation skipped: " << e.what() << "\n";
    }
  }
  log_config(cfg, dir);
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg) {
  const auto w = load_world(cfg);
  if (w.test_pairs.empty()) throw ConfigError("no test pairs in " + cfg.test_pairs_path().string());
  const TopicWorld world(w.graph, w.embeddings, cfg.agent_config());
  const auto policy = load_policy(cfg, policy_type_from_name(cfg.policy));
  const auto tolerances = cfg.tolerance_list();
  const auto rows = tolerance_sweep(world, policy, w.test_pairs, tolerances, cfg.protocol_config());
  auto out = open_out(fs::path(cfg.output_dir) / "sweep.tsv");
  write_results_header(out);
  for (const auto& r : rows) {
    write_results_row(out, r);
    std::cout << "k=" << r.tolerance.label() << " gcr=" << r.metrics.reported.gcr
              << " us=" << r.metrics.reported.us << " gw=" << r.gw.mean << "+-" << r.gw.sd << "\n";
  }
  log_config(cfg, cfg.output_dir);
  return kExitOk;
}

int cmd_ablate(const RunConfig& cfg) {
  const auto w = load_world(cfg);
  if (w.train_pairs.empty() || w.test_pairs.empty())
    throw ConfigError("ablation needs both training and test pairs");
  const TopicWorld world(w.graph, w.embeddings, cfg.agent_config());
  auto recipe = cfg.train_recipe();
  recipe.type = PolicyType::kProi;
  recipe.disabled = {};
  const auto full = train_model(world, w.train_pairs, recipe).model;
  const auto tolerances = cfg.tolerance_list();
  auto out = open_out(fs::path(cfg.output_dir) / "ablation.tsv");
  write_results_header(out);
  bool first = true;
  for (const auto& mask : cfg.ablation_list()) {
    const auto r = ablate_factors(world, w.train_pairs, w.test_pairs, mask, recipe, tolerances,
                                  cfg.protocol_config(), full);
    if (first)
      for (const auto& f : r.full) write_results_row(out, f);
    first = false;
    for (std::size_t i = 0; i < r.ablated.size(); ++i) {
      write_results_row(out, r.ablated[i]);
      std::cout << r.ablated[i].policy << " k=" << tolerances[i].label()
                << " gcr " << r.full[i].metrics.reported.gcr << " -> "
                << r.ablated[i].metrics.reported.gcr << ", us " << r.full[i].metrics.reported.us
                << " -> " << r.ablated[i].metrics.reported.us << "\n";
    }
  }
  log_config(cfg, cfg.output_dir);
  return kExitOk;
}

int cmd_serve(const RunConfig& cfg) {
  const auto w = load_world(cfg);
  const TopicWorld world(w.graph, w.embeddings, cfg.agent_config());
  SessionService service(world, derive_seed(cfg.seed, {105}));
  httplib::Server server;
  register_routes(server, service);
  log_config(cfg, cfg.output_dir);
  std::cout << "listening on http://" << cfg.host << ":" << cfg.port << "\n" << std::flush;
  if (!server.listen(cfg.host, cfg.port))
    throw Error("cannot listen on " + cfg.host + ":" + std::to_string(cfg.port));
  return kExitOk;
}

void print_reply(const ApiReply& r) {
  const auto& b = r.body;
  if (b.contains("diagnostics") && !b["diagnostics"].is_null()) {
    const auto& d = b["diagnostics"];
    std::cout << "agent[" << d["turn"] << "]: " << d["agent_topic"].get<std::string>()
              << "  (gw " << d["gw"].dump() << ", est distance " << d["est_distance"]
              << ", est satisfaction " << d["est_satisfaction"] << ")\n";
  }
  if (b["status"] == "ended") std::cout << "dialogue ended: " << b["outcome"].get<std::string>() << "\n";
}

int cmd_play(const RunConfig& cfg, const std::string& start, const std::string& goal) {
  if (start.empty() || goal.empty()) throw ConfigError("play needs --start and --goal");
  const auto w = load_world(cfg);
  const TopicWorld world(w.graph, w.embeddings, cfg.agent_config());
  SessionService service(world, derive_seed(cfg.seed, {105}));
  nlohmann::json req = {{"start", start}, {"goal", goal}, {"policy", cfg.policy}};
  const auto type = policy_type_from_name(cfg.policy);
  if (type == PolicyType::kProi || type == PolicyType::kDegrade)
    req["checkpoint"] = cfg.checkpoint_path(cfg.policy).string();

  auto run = [&](auto&& fn) -> std::optional<ApiReply> {
    try {
      return fn();
    } catch (const ApiError& e) {
      std::cout << "error " << e.status() << ": " << e.what() << "\n";
      return std::nullopt;
    }
  };
  const auto created = run([&] { return service.create_session(req); });
  if (!created) return kExitData;
  const std::string id = created->body["session_id"];
  print_reply(*created);
  std::cout << "reply with: c (cooperate) | t label=pref [label=pref ...] | q (quit) | n [hops]\n";
  std::string line;
  while (created->body["status"] == "active" && std::cout << "> " << std::flush &&
         std::getline(std::cin, line)) {
    std::istringstream in(line);
    std::string verb;
    in >> verb;
    nlohmann::json body;
    if (verb == "c") {
      body = {{"mode", "cooperative"}};
    } else if (verb == "q") {
      body = {{"mode", "quit"}};
    } else if (verb == "t") {
      body = {{"mode", "topics"}, {"mentions", nlohmann::json::array()}};
      std::string tok;
      while (in >> tok) {
        const auto eq = tok.rfind('=');
        double pref = 0.5;
        std::string label = tok;
        if (eq != std::string::npos) {
          label = tok.substr(0, eq);
          try {
            pref = std::stod(tok.substr(eq + 1));
          } catch (const std::exception&) {
            std::cout << "bad preference in '" << tok << "'\n";
            continue;
          }
        }
        body["mentions"].push_back({{"label", label}, {"preference", pref}});
      }
    } else if (verb == "n") {
      std::string hops = "1";
      in >> hops;
      const auto state = service.get_state(id);
      const auto& hist = state.body["history"];
      const std::string center = hist.back()["agent_topic"];
      if (auto r = run([&] { return service.graph_neighbors(center, hops); }))
        for (const auto& n : r->body["neighbors"])
          std::cout << "  " << n["label"].get<std::string>() << " (" << n["hop"] << ")\n";
      continue;
    } else {
      std::cout << "unknown reply '" << verb << "'\n";
      continue;
    }
    const auto r = run([&] { return service.respond(id, body); });
    if (!r) continue;
    print_reply(*r);
    if (r->body["status"] == "ended") break;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proactive dialogue policy lab"};
  app.require_subcommand(1);

  std::string config_path, preset_name, world_dir, out_dir, tolerance, policy, policies,
      checkpoint, start, goal;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs, rounds, port;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--preset", preset_name, "paper | desk (applied before the config file)");
    sub->add_option("--set", overrides, "key=value override, repeatable");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--world", world_dir, "world directory");
    sub->add_option("--out", out_dir, "output directory");
  };
  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"gen-world", "generate a synthetic knowledge graph and start-goal pairs"},
      {"embed", "train topic embeddings for a world"},
      {"train", "train a goal-weight policy with deep Q-learning"},
      {"eval", "evaluate policies over the multi-round protocol"},
      {"ablate", "train and evaluate factor ablations"},
      {"sweep", "evaluate one policy across tolerance values"},
      {"serve", "run the HTTP session service"},
      {"play", "talk to a policy in the terminal"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    subs[c.name] = sub;
  }
  for (const char* name : {"train", "ablate"}) subs[name]->add_option("--epochs", epochs);
  for (const char* name : {"eval", "sweep", "ablate"}) {
    subs[name]->add_option("--rounds", rounds);
    subs[name]->add_option("--tolerance", tolerance, "comma list, e.g. 0.8,1.0,1.2,mixed");
  }
  for (const char* name : {"train", "sweep", "play"}) subs[name]->add_option("--policy", policy);
  subs["eval"]->add_option("--policies", policies, "comma list of policy names");
  for (const char* name : {"sweep", "play", "train"})
    subs[name]->add_option("--checkpoint", checkpoint);
  subs["serve"]->add_option("--port", port);
  subs["play"]->add_option("--start", start);
  subs["play"]->add_option("--goal", goal);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg = preset_name.empty() ? RunConfig{} : preset(preset_name);
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    for (const auto& o : overrides) apply_override(cfg, o);
    if (seed) cfg.seed = *seed;
    if (!world_dir.empty()) cfg.world_dir = world_dir;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (epochs) cfg.epochs = *epochs;
    if (rounds) cfg.rounds = *rounds;
    if (!tolerance.empty()) cfg.tolerances = tolerance;
    if (!policy.empty()) cfg.policy = policy;
    if (!policies.empty()) cfg.policies = policies;
    if (!checkpoint.empty()) cfg.checkpoint = checkpoint;
    if (port) cfg.port = *port;
    cfg.validate();

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "gen-world") return cmd_gen_world(cfg);
    if (cmd == "embed") return cmd_embed(cfg);
    if (cmd == "train") return cmd_train(cfg);
    if (cmd == "eval") return cmd_eval(cfg);
    if (cmd == "ablate") return cmd_ablate(cfg);
    if (cmd == "sweep") return cmd_sweep(cfg);
    if (cmd == "serve") return cmd_serve(cfg);
    if (cmd == "play") return cmd_play(cfg, start, goal);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
