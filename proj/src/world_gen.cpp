// SPDX-License-Identifier: Apache-2.0
#include "proactive/world_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "proactive/errors.hpp"
#include "proactive/rng.hpp"

namespace proactive {

namespace {

constexpr const char* kRelations[] = {"related_to", "part_of", "type_of", "located_in",
                                      "associated_with"};

std::string topic_label(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "topic_%04d", i);
  return buf;
}

std::string trim_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

void SyntheticWorldSpec::validate() const {
  if (node_count < 10) throw ConfigError("node_count must be >= 10");
  if (attachment < 1) throw ConfigError("attachment must be >= 1");
  if (attachment >= node_count) throw ConfigError("attachment must be below node_count");
  if (pair_count < 1) throw ConfigError("pair_count must be >= 1");
  if (min_distance < 1 || max_distance < min_distance)
    throw ConfigError("pair distance bounds must satisfy 1 <= min_distance <= max_distance");
  if (!(train_fraction >= 0 && train_fraction <= 1))
    throw ConfigError("train_fraction must lie in [0,1]");
}

KnowledgeGraph generate_graph(const SyntheticWorldSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, {1}));
  std::uniform_int_distribution<std::size_t> rel_pick(0, std::size(kRelations) - 1);

  KnowledgeGraph::Builder b;
  for (int i = 0; i < spec.node_count; ++i) b.add_topic(topic_label(i));

  // Each edge contributes both endpoints, so uniform draws from this list
  // are degree-proportional.
  std::vector<int> endpoints;
  auto link = [&](int u, int v) {
    b.add_triple(topic_label(u), kRelations[rel_pick(rng)], topic_label(v));
    endpoints.push_back(u);
    endpoints.push_back(v);
  };
  const int m = spec.attachment;
  const int seed_nodes = std::max(m, 1);
  for (int u = 0; u < seed_nodes; ++u)
    for (int v = u + 1; v < seed_nodes; ++v) link(u, v);

  for (int n = seed_nodes; n < spec.node_count; ++n) {
    std::set<int> targets;
    if (endpoints.empty()) {
      targets.insert(0);  // m = 1: the lone seed node has no degree yet
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
      while (static_cast<int>(targets.size()) < std::min(m, n)) targets.insert(endpoints[pick(rng)]);
    }
    for (int t : targets) link(n, t);
  }
  return std::move(b).build();
}

std::vector<TopicPair> sample_pairs(const KnowledgeGraph& graph, const SyntheticWorldSpec& spec) {
  spec.validate();
  std::vector<TopicPair> eligible;
  for (std::uint32_t s = 0; s < graph.topic_count(); ++s) {
    const auto dist = bfs_distances(graph, TopicId{s});
    for (std::uint32_t g = 0; g < graph.topic_count(); ++g)
      if (dist[g] >= spec.min_distance && dist[g] <= spec.max_distance)
        eligible.emplace_back(TopicId{s}, TopicId{g});
  }
  if (eligible.size() < static_cast<std::size_t>(spec.pair_count))
    throw ConfigError("pair distance bounds are infeasible: only " +
                      std::to_string(eligible.size()) + " pairs qualify, " +
                      std::to_string(spec.pair_count) + " requested");
  Rng rng(derive_seed(spec.seed, {2}));
  // Partial Fisher-Yates with an explicit distribution keeps the draw
  // independent of the standard library's shuffle algorithm.
  for (std::size_t i = 0; i < static_cast<std::size_t>(spec.pair_count); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, eligible.size() - 1);
    std::swap(eligible[i], eligible[pick(rng)]);
  }
  eligible.resize(spec.pair_count);
  return eligible;
}

SyntheticWorld generate_world(const SyntheticWorldSpec& spec) {
  SyntheticWorld w{generate_graph(spec), {}, {}};
  auto pairs = sample_pairs(w.graph, spec);
  const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * pairs.size()));
  w.train_pairs.assign(pairs.begin(), pairs.begin() + n_train);
  w.test_pairs.assign(pairs.begin() + n_train, pairs.end());
  return w;
}

std::vector<TopicPair> load_pairs(std::istream& in, const KnowledgeGraph& graph) {
  std::vector<TopicPair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim_cr(line);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(lineno, "expected 'start<TAB>goal'");
    const auto start = line.substr(0, tab);
    const auto goal = line.substr(tab + 1);
    if (!graph.contains(start)) throw ParseError(lineno, "unknown topic '" + start + "'");
    if (!graph.contains(goal)) throw ParseError(lineno, "unknown topic '" + goal + "'");
    if (start == goal) throw ParseError(lineno, "start equals goal");
    out.emplace_back(graph.find(start), graph.find(goal));
  }
  return out;
}

void write_pairs(std::ostream& out, const KnowledgeGraph& graph,
                 const std::vector<TopicPair>& pairs) {
  for (const auto& [s, g] : pairs) out << graph.label(s) << '\t' << graph.label(g) << '\n';
}

void write_world(const std::filesystem::path& dir, const SyntheticWorld& world) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw DataError("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("triples.tsv");
    write_triples(world.graph, f);
  }
  {
    auto f = open("train_pairs.tsv");
    write_pairs(f, world.graph, world.train_pairs);
  }
  {
    auto f = open("test_pairs.tsv");
    write_pairs(f, world.graph, world.test_pairs);
  }
}

}  // namespace proactive
