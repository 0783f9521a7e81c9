// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Trend criteria compare per-round means on paired seeds; the
// Pareto-reported values are printed alongside.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "grad_check.hpp"
#include "proactive/config.hpp"
#include "proactive/errors.hpp"
#include "proactive/evaluation.hpp"
#include "proactive/metrics.hpp"
#include "proactive/simulator.hpp"
#include "proactive/trainer.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace proactive;
using namespace testing_support;

namespace {

struct Outcome2 {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

// Plain BFS over an adjacency list copied from the graph.
std::vector<int> oracle_bfs(const std::vector<std::vector<int>>& adj, int from) {
  std::vector<int> d(adj.size(), -1);
  std::vector<int> q{from};
  d[from] = 0;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (int n : adj[q[i]])
      if (d[n] < 0) {
        d[n] = d[q[i]] + 1;
        q.push_back(n);
      }
  return d;
}

std::vector<std::vector<int>> adjacency_of(const KnowledgeGraph& g) {
  std::vector<std::vector<int>> adj(g.topic_count());
  for (const auto& t : g.triples()) {
    adj[t.head.index()].push_back(static_cast<int>(t.tail.index()));
    adj[t.tail.index()].push_back(static_cast<int>(t.head.index()));
  }
  return adj;
}

// ---------------------------------------------------------------- A1
Outcome2 a1_distance() {
  const auto t0 = Clock::now();
  const DistanceConfig cfg;
  long pairs = 0, mismatches = 0;
  for (int i = 0; i < 25; ++i) {
    SyntheticWorldSpec spec;
    spec.node_count = 100 + 8 * i;
    spec.attachment = 1 + i % 3;
    spec.seed = 1000 + i;
    const auto g = generate_graph(spec);
    const auto adj = adjacency_of(g);
    const int n = static_cast<int>(g.topic_count());
    DistanceCache cache;
    for (int a = 0; a < n; ++a) {
      const auto d = oracle_bfs(adj, a);
      for (int b = 0; b < n; ++b) {
        if (d[b] < 0) return {false, "generated graph is disconnected"};
        const double expect = d[b] <= cfg.limit ? d[b] : cfg.d_max;
        const double got = estimate_distance(g, TopicId{std::uint32_t(a)}, TopicId{std::uint32_t(b)},
                                             cfg, &cache);
        ++pairs;
        if (got != expect) ++mismatches;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 60,
          std::to_string(pairs) + " pairs, " + std::to_string(mismatches) + " mismatches, " +
              fmt(secs, 1) + " s"};
}

// ---------------------------------------------------------------- A2
Outcome2 a2_ridge() {
  const int dim = 50, n = 60;
  const auto raw_rows = random_table(n, dim, 2024);
  std::mt19937_64 rng(2025);
  std::normal_distribution<double> g;
  std::vector<double> truth(dim);
  for (double& x : truth) x = g(rng);
  std::vector<double> dots(n, 0.0);
  double hi = 0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) dots[i] += raw_rows.row(tid(i))[k] * truth[k];
    hi = std::max(hi, std::abs(dots[i]));
  }
  // Observations are clamped to [0,1]: scale u* so |E u*| <= 0.9 and flip
  // rows whose dot product is negative.
  const double s = 0.9 / hi;
  for (double& x : truth) x *= s;
  EmbeddingTable rows(n, dim);
  ObservationSet obs;
  for (int i = 0; i < n; ++i) {
    const double sign = dots[i] < 0 ? -1 : 1;
    for (int k = 0; k < dim; ++k) rows.row(tid(i))[k] = sign * raw_rows.row(tid(i))[k];
    obs.observe(tid(i), std::abs(dots[i]) * s);
  }
  RidgeOptions opt;
  opt.beta = 1e-8;
  const auto fit = fit_user_vector(obs, rows, opt.beta);
  double err = 0;
  for (int k = 0; k < dim; ++k) err = std::max(err, std::abs(fit[k] - truth[k]));
  const auto shrunk = fit_user_vector(obs, rows, 1e9);
  double mag = 0;
  for (double x : shrunk) mag = std::max(mag, std::abs(x));
  char buf[160];
  std::snprintf(buf, sizeof buf, "recovery err %.2e (beta 1e-8), |u| %.2e (beta 1e9)", err, mag);
  return {err < 1e-6 && mag < 1e-6, buf};
}

// ---------------------------------------------------------------- A3
Outcome2 a3_gradients() {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> size(1, 7);
  double worst = 0;
  std::size_t checked = 0;
  for (std::uint64_t point = 0; point < 5; ++point) {
    std::vector<Transition> items;
    for (int i = 0; i < 8; ++i) {
      const int n = size(rng);
      Transition t;
      for (int k = 0; k < n; ++k) {
        t.state.topics.push_back(tid(k));
        t.state.rank_d.push_back(k + 1);
        t.state.rank_p.push_back(n - k);
      }
      std::shuffle(t.state.rank_p.begin(), t.state.rank_p.end(), rng);
      t.state.inputs.turn_norm = (i + 1) / 20.0;
      t.state.inputs.gcd_norm = std::uniform_real_distribution<double>(0, 1)(rng);
      t.state.inputs.eus = std::uniform_real_distribution<double>(0, 1)(rng);
      for (int k = 0; k < i; ++k) t.state.inputs.cooperation.push_back(int(rng() % 2));
      t.action = static_cast<std::size_t>(i % n);
      items.push_back(std::move(t));
    }
    std::vector<const Transition*> batch;
    std::vector<double> targets;
    for (const auto& t : items) {
      batch.push_back(&t);
      targets.push_back(std::uniform_real_distribution<double>(0, 8)(rng));
    }
    for (auto m : {GoalWeightModel::proi({}, point), GoalWeightModel::degrade(point)}) {
      randomize(m, 500 + point);
      std::vector<double> grad(m.params().size());
      batch_loss(m, batch, targets, grad);
      const auto r = compare_gradient(m, [&] { return batch_loss(m, batch, targets, {}); }, grad);
      worst = std::max(worst, r.max_rel);
      checked += r.checked;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu parameter checks, max relative error %.2e (floor %.0e x max(1,|loss|))",
                checked, worst, kGradFloor);
  return {worst < 1e-4, buf};
}

// ---------------------------------------------------------------- A4
Outcome2 a4_simulator() {
  SyntheticWorldSpec spec;
  spec.seed = 44;
  const auto g = generate_graph(spec);
  const auto adj = adjacency_of(g);
  const int n = static_cast<int>(g.topic_count());
  const auto emb = random_table(n, 16, 45);
  const SimulatorConfig cfg;
  std::mt19937_64 rng(46);
  Rng user_rng(47);
  long violations = 0;
  std::map<Behavior, int> seen;
  for (int c = 0; c < 10000; ++c) {
    const double k = MixedProfileSource::kTolerances[rng() % 3];
    const auto prof = sample_profile(emb, k, rng(), cfg);
    // The goal is never proposed, so no history ends early.
    DialogueHistory h(tid(int(rng() % (n - 1))), tid(n - 1), 20);
    std::vector<double> values;
    const int len = int(rng() % 6);
    for (int t = 0; t < len; ++t) {
      const int a = int(rng() % (n - 1));
      h.add_agent_topic(tid(a));
      if (rng() % 2) {
        h.add_response(Cooperative{tid(a), prof.preferences[a]});
        values.push_back(prof.preferences[a]);
      } else {
        std::set<int> topics{a};
        NonCooperative nc;
        const int m = 1 + int(rng() % 3);
        for (int j = 0; j < m; ++j) {
          const int b = int(rng() % n);
          if (!topics.insert(b).second) continue;
          nc.mentions.push_back({tid(b), prof.preferences[b]});
        }
        double sum = 0;
        for (int x : topics) sum += prof.preferences[x];
        values.push_back(sum / double(topics.size()));
        h.add_response(nc);
      }
    }
    const int agent = int(rng() % (n - 1));
    values.push_back(prof.preferences[agent]);
    double us = 0;
    for (double v : values) us += v;
    us /= double(values.size());
    const double qc = cfg.q_c_star / k, qq = cfg.q_q_star / k;
    const Behavior expect = us > qc ? Behavior::kCooperative
                            : us > qq ? Behavior::kNonCooperative
                                      : Behavior::kQuit;
    ++seen[expect];
    const auto r = respond(prof, g, h, tid(agent), cfg, user_rng);
    switch (expect) {
      case Behavior::kCooperative:
        if (!std::holds_alternative<Cooperative>(r)) ++violations;
        break;
      case Behavior::kQuit:
        if (!std::holds_alternative<Quit>(r)) ++violations;
        break;
      case Behavior::kNonCooperative: {
        const auto* nc = std::get_if<NonCooperative>(&r);
        if (!nc || nc->mentions.empty() || nc->mentions.size() > 3) {
          ++violations;
          break;
        }
        const auto d = oracle_bfs(adj, agent);
        std::set<TopicId> uniq;
        for (const auto& m : nc->mentions) {
          const int hop = d[m.topic.index()];
          if (hop < 1 || hop > 3 || !uniq.insert(m.topic).second) ++violations;
        }
        break;
      }
    }
  }
  const std::string mix = std::to_string(seen[Behavior::kCooperative]) + "/" +
                          std::to_string(seen[Behavior::kNonCooperative]) + "/" +
                          std::to_string(seen[Behavior::kQuit]);
  const long cases = seen[Behavior::kCooperative] + seen[Behavior::kNonCooperative] + seen[Behavior::kQuit];
  return {violations == 0 && cases == 10000 && seen.size() == 3,
          std::to_string(cases) + " cases (coop/topics/quit " + mix + "), " +
              std::to_string(violations) + " violations"};
}

// ---------------------------------------------------------------- A5
Outcome2 a5_metrics(double max_us_gap, std::size_t episodes) {
  EpisodeRecord success;
  success.outcome = Outcome::kSuccess;
  success.turns.resize(10);
  EpisodeRecord failure;
  failure.outcome = Outcome::kTimeout;
  failure.turns.resize(20);
  const std::vector<EpisodeRecord> one{success}, two{success, failure};
  const double g1 = gcr(one, 0.02), g2 = gcr(two, 0.02);

  EpisodeRecord us;
  TurnRecord t1, t2;
  t1.agent_topic = tid(0);
  t1.agent_preference = 0.6;
  t1.response = Cooperative{tid(0), 0.6};
  t2.agent_topic = tid(1);
  t2.agent_preference = 0.8;
  t2.response = NonCooperative{{{tid(2), 0.2}, {tid(3), 0.4}}};
  us.turns = {t1};
  const double u1 = episode_us(us);
  us.turns = {t1, t2};
  const double u2 = episode_us(us);

  const bool ok = std::abs(g1 - 0.81873075307798) < 1e-9 && std::abs(g2 - 0.40936537653899) < 1e-9 &&
                  std::abs(u1 - 0.6) < 1e-9 && std::abs(u2 - (0.6 + 1.4 / 3) / 2) < 1e-9 &&
                  max_us_gap < 1e-12 && episodes > 0;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "gcr %.5f / %.5f, us %.4f / %.4f, eval-vs-simulator US gap %.1e over %zu episodes",
                g1, g2, u1, u2, max_us_gap, episodes);
  return {ok, buf};
}

// ---------------------------------------------------------------- A6
Outcome2 a6_pareto() {
  std::mt19937_64 rng(66);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + int(rng() % 100);
    const int levels = 2 + trial % 50;
    std::vector<MetricPair> xs(n);
    for (auto& x : xs) x = {double(rng() % levels) / levels, double(rng() % levels) / levels};
    std::vector<MetricPair> oracle;
    for (const auto& a : xs) {
      bool dom = false;
      for (const auto& b : xs)
        if (b.gcr >= a.gcr && b.us >= a.us && (b.gcr > a.gcr || b.us > a.us)) dom = true;
      if (!dom) oracle.push_back(a);
    }
    if (pareto_report(xs).pareto_front != oracle) ++mismatches;
  }
  return {mismatches == 0, "1000 sets, " + std::to_string(mismatches) + " mismatches"};
}

// ------------------------------------------------------- desk experiments
struct Desk {
  RunConfig cfg = preset("desk");
  SyntheticWorld synth;
  EmbeddingTable embeddings;
  std::unique_ptr<TopicWorld> world;
};

std::unique_ptr<Desk> build_desk() {
  auto d = std::make_unique<Desk>();
  d->synth = generate_world(d->cfg.world_spec());
  d->embeddings = train_embeddings(d->synth.graph, d->cfg.embedding_dim, d->cfg.walk_params());
  d->world = std::make_unique<TopicWorld>(d->synth.graph, d->embeddings, d->cfg.agent_config());
  return d;
}

TrainedModel train_policy(const Desk& d, PolicyType type, FactorMask disabled = {}) {
  auto recipe = d.cfg.train_recipe();
  recipe.type = type;
  recipe.disabled = disabled;
  return train_model(*d.world, d.synth.train_pairs, recipe);
}

std::string pair_str(const ProtocolResult& r) {
  return r.policy + " gcr " + fmt(r.metrics.mean.gcr) + " us " + fmt(r.metrics.mean.us) +
         " (pareto " + fmt(r.metrics.reported.gcr) + "/" + fmt(r.metrics.reported.us) + ")";
}

// ---------------------------------------------------------------- A10
Outcome2 a10_determinism() {
  const fs::path root = fs::current_path() / "acceptance_a10";
  fs::remove_all(root);
  const std::string cli = PROACTIVE_CLI;
  const std::string common = " --preset desk --set node_count=120 --set pair_count=100"
                             " --set embedding_dim=16 --set epochs=2 --world " +
                             (root / "world").string();
  auto sh = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " > " + (root / "log.txt").string() + " 2>&1";
    return std::system(cmd.c_str());
  };
  fs::create_directories(root);
  if (sh("gen-world" + common) != 0 || sh("embed" + common) != 0)
    return {false, "world preparation failed"};
  for (const char* run : {"run1", "run2"}) {
    const std::string out = " --out " + (root / run).string();
    if (sh("train --policy proi" + common + out) != 0) return {false, std::string(run) + " train failed"};
    if (sh("eval --policies random,proi --rounds 3 --tolerance 1.0,mixed" + common + out) != 0)
      return {false, std::string(run) + " eval failed"};
  }
  auto bytes = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string diff;
  int compared = 0;
  for (const char* f : {"proi_checkpoint.json", "proi_training_log.tsv", "results.tsv",
                        "transcripts.jsonl", "factor_pairs.tsv"}) {
    const auto a = bytes(root / "run1" / f), b = bytes(root / "run2" / f);
    if (a.empty() || a != b) diff += std::string(" ") + f;
    ++compared;
  }
  fs::remove_all(root);
  return {diff.empty(), diff.empty() ? std::to_string(compared) + " files byte-identical"
                                     : "differ or missing:" + diff};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, Outcome2>> results;
  auto record = [&](const std::string& id, const std::function<Outcome2()>& f) {
    Outcome2 o;
    const auto t0 = Clock::now();
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << id << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "  ["
              << fmt(seconds_since(t0), 1) << " s]" << std::endl;
    results.emplace_back(id, o);
  };

  record("A1", a1_distance);
  record("A2", a2_ridge);
  record("A3", a3_gradients);
  record("A4", a4_simulator);
  record("A6", a6_pareto);

  // A5's evaluation-side check, A7, A8 and A9 share one desk world and the
  // full 100-round protocol over the 100 held-out pairs.
  std::unique_ptr<Desk> desk;
  std::optional<TrainedModel> proi;
  std::map<std::string, ProtocolResult> at1;
  double us_gap = 0;
  std::size_t episodes = 0;
  const auto a7_start = Clock::now();
  record("A7", [&]() -> Outcome2 {
    desk = build_desk();
    const auto& d = *desk;
    proi = train_policy(d, PolicyType::kProi);
    const auto degrade = train_policy(d, PolicyType::kDegrade);
    const auto pcfg = d.cfg.protocol_config();
    const auto k1 = ToleranceSpec::fixed(1.0);
    const EpisodeSink sink = [&](int, std::size_t, const EpisodeRecord& r) {
      us_gap = std::max(us_gap, std::abs(episode_us(r) - r.final_us));
      ++episodes;
    };
    const std::vector<std::pair<std::string, Policy>> policies{
        {"random", Policy::baseline(PolicyType::kRandom)},
        {"pop_gcr", Policy::baseline(PolicyType::kPopGcr)},
        {"pop_us", Policy::baseline(PolicyType::kPopUs)},
        {"degrade", Policy::learned(degrade.model)},
        {"proi", Policy::learned(proi->model)}};
    for (const auto& [name, p] : policies)
      at1[name] = run_protocol(*d.world, p, d.synth.test_pairs, k1, pcfg, sink);
    for (const auto& [name, r] : at1) std::cout << "    " << pair_str(r) << "\n";

    const auto g = [&](const char* n) { return at1.at(n).metrics.mean.gcr; };
    const auto u = [&](const char* n) { return at1.at(n).metrics.mean.us; };
    const bool pop_us = u("pop_us") > u("random");
    bool pop_gcr = true;
    for (const char* n : {"random", "pop_us", "degrade", "proi"}) pop_gcr = pop_gcr && g("pop_gcr") > g(n);
    const bool proi_gcr = g("proi") > g("random");
    const bool proi_us = u("proi") > u("pop_gcr");
    const double secs = seconds_since(a7_start);
    std::string detail = std::string("PopUS.US>Random.US ") + (pop_us ? "yes" : "no") +
                         ", PopGCR.GCR max " + (pop_gcr ? "yes" : "no") + ", PROI.GCR>Random.GCR " +
                         (proi_gcr ? "yes" : "no") + ", PROI.US>PopGCR.US " + (proi_us ? "yes" : "no") +
                         ", " + std::to_string(d.synth.test_pairs.size()) + " pairs x " +
                         std::to_string(pcfg.rounds) + " rounds, " + fmt(secs, 0) + " s";
    return {pop_us && pop_gcr && proi_gcr && proi_us && secs < 900, detail};
  });
  record("A5", [&] { return a5_metrics(us_gap, episodes); });

  record("A8", [&]() -> Outcome2 {
    if (!proi) return {false, "no trained PROI model (A7 failed to train)"};
    const auto& d = *desk;
    const auto pcfg = d.cfg.protocol_config();
    const auto policy = Policy::learned(proi->model);
    const auto lo = run_protocol(*d.world, policy, d.synth.test_pairs, ToleranceSpec::fixed(0.8), pcfg);
    const auto hi = run_protocol(*d.world, policy, d.synth.test_pairs, ToleranceSpec::fixed(1.2), pcfg);
    const bool us_ok = lo.metrics.mean.us >= hi.metrics.mean.us;
    const bool gw_ok = lo.gw.mean <= hi.gw.mean;
    return {us_ok && gw_ok,
            "US k=0.8 " + fmt(lo.metrics.mean.us) + " vs k=1.2 " + fmt(hi.metrics.mean.us) +
                (us_ok ? " ok" : " WRONG DIRECTION") + "; mean gw " + fmt(lo.gw.mean) + " vs " +
                fmt(hi.gw.mean) + (gw_ok ? " ok" : " WRONG DIRECTION") + "; pareto US " +
                fmt(lo.metrics.reported.us) + " vs " + fmt(hi.metrics.reported.us)};
  });

  record("A9", [&]() -> Outcome2 {
    if (!proi || !at1.count("proi")) return {false, "no full PROI result (A7 failed)"};
    const auto& d = *desk;
    const auto pcfg = d.cfg.protocol_config();
    const auto& full = at1.at("proi").metrics.mean;
    std::string detail = "full gcr " + fmt(full.gcr) + " us " + fmt(full.us);
    bool ok = true;
    for (const char* mask : {"turn+gcd", "eus+cd"}) {
      const auto m = train_policy(d, PolicyType::kProi, parse_mask(mask));
      const auto r = run_protocol(*d.world, Policy::learned(m.model), d.synth.test_pairs,
                                  ToleranceSpec::fixed(1.0), pcfg);
      const bool gcr_down = r.metrics.mean.gcr < full.gcr;
      const bool us_down = r.metrics.mean.us < full.us;
      const bool this_ok = std::string(mask) == "turn+gcd" ? gcr_down : (gcr_down && us_down);
      ok = ok && this_ok;
      detail += std::string("; -") + mask + " gcr " + fmt(r.metrics.mean.gcr) + " us " +
                fmt(r.metrics.mean.us) + (this_ok ? " ok" : " WRONG DIRECTION");
    }
    return {ok, detail};
  });

  record("A10", a10_determinism);

  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    return std::stoi(a.first.substr(1)) < std::stoi(b.first.substr(1));
  });
  std::cout << "summary\n";
  int failed = 0;
  for (const auto& [id, o] : results) {
    failed += !o.pass;
    std::cout << "  " << id << ' ' << (o.pass ? "PASS" : "FAIL") << "\n";
  }
  std::cout << (failed ? "ACCEPTANCE FAILED: " + std::to_string(failed) + " criteria"
                       : std::string("ACCEPTANCE PASSED"))
            << std::endl;
  return failed ? 1 : 0;
}
