// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "proactive/errors.hpp"
#include "proactive/world_gen.hpp"

using namespace proactive;

namespace {

// Independent BFS over the adjacency the graph reports.
std::vector<int> bfs(const KnowledgeGraph& g, TopicId from) {
  std::vector<int> d(g.topic_count(), -1);
  std::vector<TopicId> q{from};
  d[from.index()] = 0;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (TopicId n : g.neighbors(q[i]))
      if (d[n.index()] < 0) {
        d[n.index()] = d[q[i].index()] + 1;
        q.push_back(n);
      }
  return d;
}

}  // namespace

TEST_CASE("desk graph size, connectivity, determinism") {
  const SyntheticWorldSpec spec;
  const auto g = generate_graph(spec);
  CHECK(g.topic_count() == 300);
  // One seed edge, then two per new node.
  CHECK(g.edge_count() == 1 + 2 * 298);
  for (int d : bfs(g, TopicId{0})) CHECK(d >= 0);
  CHECK(g.label(TopicId{0}) == "topic_0000");

  std::ostringstream a, b;
  write_triples(g, a);
  write_triples(generate_graph(spec), b);
  CHECK(a.str() == b.str());

  auto other = spec;
  other.seed = 2;
  std::ostringstream c;
  write_triples(generate_graph(other), c);
  CHECK(a.str() != c.str());
}

TEST_CASE("pairs respect distance bounds and split") {
  SyntheticWorldSpec spec;
  spec.node_count = 120;
  spec.pair_count = 200;
  const auto w = generate_world(spec);
  CHECK(w.train_pairs.size() == 160);
  CHECK(w.test_pairs.size() == 40);
  std::set<TopicPair> all;
  for (const auto* set : {&w.train_pairs, &w.test_pairs})
    for (const auto& [s, t] : *set) {
      const int d = bfs(w.graph, s)[t.index()];
      CHECK(d >= spec.min_distance);
      CHECK(d <= spec.max_distance);
      all.insert({s, t});
    }
  CHECK(all.size() == 200);
}

TEST_CASE("infeasible and invalid specs") {
  SyntheticWorldSpec spec;
  spec.node_count = 10;
  spec.min_distance = 20;
  spec.max_distance = 25;
  CHECK_THROWS_AS(generate_world(spec), ConfigError);
  spec = {};
  spec.node_count = 8;
  spec.pair_count = 10000;
  CHECK_THROWS_AS(generate_world(spec), ConfigError);
  spec = {};
  spec.train_fraction = 1.5;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = {};
  spec.min_distance = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("pair files") {
  SyntheticWorldSpec spec;
  spec.node_count = 40;
  spec.pair_count = 20;
  const auto w = generate_world(spec);
  std::ostringstream out;
  write_pairs(out, w.graph, w.test_pairs);
  std::istringstream in(out.str());
  CHECK(load_pairs(in, w.graph) == w.test_pairs);

  std::istringstream bad1("topic_0001\n");
  CHECK_THROWS_AS(load_pairs(bad1, w.graph), ParseError);
  std::istringstream bad2("topic_0001\tnowhere\n");
  CHECK_THROWS_AS(load_pairs(bad2, w.graph), ParseError);
  std::istringstream bad3("topic_0001\ttopic_0001\n");
  CHECK_THROWS_AS(load_pairs(bad3, w.graph), ParseError);

  const auto dir = std::filesystem::temp_directory_path() / "proactive_world_test";
  std::filesystem::remove_all(dir);
  write_world(dir, w);
  for (const char* f : {"triples.tsv", "train_pairs.tsv", "test_pairs.tsv"})
    CHECK(std::filesystem::exists(dir / f));
  std::ifstream tin(dir / "triples.tsv");
  CHECK(load_triples(tin).edge_count() == w.graph.edge_count());
  std::filesystem::remove_all(dir);
}
