// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <utility>
#include <vector>

#include "proactive/graph.hpp"

namespace proactive {

struct SyntheticWorldSpec {
  int node_count = 300;
  int attachment = 2;  // edges per new node
  std::uint64_t seed = 1;
  int pair_count = 500;
  int min_distance = 2;
  int max_distance = 6;
  double train_fraction = 0.8;

  void validate() const;
};

using TopicPair = std::pair<TopicId, TopicId>;

struct SyntheticWorld {
  KnowledgeGraph graph;
  std::vector<TopicPair> train_pairs;
  std::vector<TopicPair> test_pairs;
};

// Preferential attachment: a fully connected seed of `attachment` nodes
// (a single node when attachment is 1), then every new node links to
// `attachment` distinct existing nodes drawn proportionally to degree.
KnowledgeGraph generate_graph(const SyntheticWorldSpec& spec);

// Distinct ordered pairs whose BFS distance lies in the spec's bounds.
std::vector<TopicPair> sample_pairs(const KnowledgeGraph& graph, const SyntheticWorldSpec& spec);

SyntheticWorld generate_world(const SyntheticWorldSpec& spec);

// start TAB goal, by label
std::vector<TopicPair> load_pairs(std::istream& in, const KnowledgeGraph& graph);
void write_pairs(std::ostream& out, const KnowledgeGraph& graph, const std::vector<TopicPair>& pairs);

// triples.tsv, train_pairs.tsv, test_pairs.tsv
void write_world(const std::filesystem::path& dir, const SyntheticWorld& world);

}  // namespace proactive
