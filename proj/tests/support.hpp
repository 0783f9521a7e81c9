// SPDX-License-Identifier: Apache-2.0
// Small graph/world builders and independent oracles shared by the tests.
#pragma once

#include <deque>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "proactive/embeddings.hpp"
#include "proactive/graph.hpp"

namespace testing_support {

using proactive::KnowledgeGraph;
using proactive::TopicId;
using Edge = std::pair<int, int>;

inline std::string node(int i) { return "n" + std::to_string(i); }

// Topics n0..n{n-1} get ids 0..n-1.
inline KnowledgeGraph graph_from_edges(int n, const std::vector<Edge>& edges) {
  KnowledgeGraph::Builder b;
  for (int i = 0; i < n; ++i) b.add_topic(node(i));
  for (auto [u, v] : edges) b.add_triple(node(u), "r", node(v));
  return std::move(b).build();
}

inline std::vector<Edge> path_edges(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return e;
}

// Random spanning tree plus `extra` random chords.
inline std::vector<Edge> random_connected_edges(int n, int extra, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Edge> e;
  for (int i = 1; i < n; ++i) e.emplace_back(std::uniform_int_distribution<int>(0, i - 1)(rng), i);
  std::uniform_int_distribution<int> any(0, n - 1);
  for (int k = 0; k < extra; ++k) {
    const int u = any(rng), v = any(rng);
    if (u != v) e.emplace_back(u, v);
  }
  return e;
}

// All-pairs hop distances by BFS over a plain adjacency matrix; -1 when
// unreachable. Shares no code with the library.
inline std::vector<std::vector<int>> oracle_distances(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (auto [u, v] : edges)
    if (u != v) adj[u][v] = adj[v][u] = 1;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, -1));
  for (int s = 0; s < n; ++s) {
    std::deque<int> q{s};
    d[s][s] = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (int v = 0; v < n; ++v)
        if (adj[u][v] && d[s][v] < 0) {
          d[s][v] = d[s][u] + 1;
          q.push_back(v);
        }
    }
  }
  return d;
}

inline proactive::EmbeddingTable table_from_rows(const std::vector<std::vector<double>>& rows) {
  proactive::EmbeddingTable t(rows.size(), static_cast<int>(rows.empty() ? 0 : rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto r = t.row(TopicId{static_cast<std::uint32_t>(i)});
    for (std::size_t k = 0; k < rows[i].size(); ++k) r[k] = rows[i][k];
  }
  return t;
}

inline proactive::EmbeddingTable random_table(std::size_t rows, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  proactive::EmbeddingTable t(rows, dim);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (double& x : t.row(TopicId{i})) x = g(rng);
  return t;
}

inline TopicId tid(int i) { return TopicId{static_cast<std::uint32_t>(i)}; }

}  // namespace testing_support
