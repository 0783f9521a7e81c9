// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace proactive {

// Dense topic index; ids are contiguous 0..|E|-1 within one graph.
struct TopicId {
  std::uint32_t value = 0;

  constexpr TopicId() = default;
  constexpr explicit TopicId(std::uint32_t v) : value(v) {}
  constexpr std::size_t index() const noexcept { return value; }
  friend constexpr auto operator<=>(TopicId, TopicId) = default;
};

struct Triple {
  TopicId head;
  std::uint32_t relation = 0;
  TopicId tail;
  friend constexpr auto operator<=>(const Triple&, const Triple&) = default;
};

// Hop distances from a center, sorted by topic id.
using HopBall = std::map<TopicId, int>;

// Immutable topic/relation store. Edges are traversed undirected.
class KnowledgeGraph {
 public:
  class Builder {
   public:
    TopicId add_topic(const std::string& label);
    std::uint32_t add_relation(const std::string& label);
    // Self-loops are ignored; duplicates are dropped in build().
    void add_triple(const std::string& head, const std::string& relation,
                    const std::string& tail);
    std::size_t topic_count() const noexcept { return labels_.size(); }
    KnowledgeGraph build() &&;

   private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, TopicId> topic_index_;
    std::vector<std::string> relations_;
    std::unordered_map<std::string, std::uint32_t> relation_index_;
    std::vector<Triple> triples_;
  };

  std::size_t topic_count() const noexcept { return labels_.size(); }
  std::size_t relation_count() const noexcept { return relations_.size(); }
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  const std::string& label(TopicId id) const;
  const std::string& relation_label(std::uint32_t rel) const;
  TopicId find(const std::string& label) const;  // throws LookupError
  bool contains(const std::string& label) const;
  bool contains(TopicId id) const noexcept { return id.index() < labels_.size(); }
  std::span<const TopicId> neighbors(TopicId id) const;  // throws LookupError
  std::size_t edge_count() const noexcept;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, TopicId> topic_index_;
  std::vector<std::string> relations_;
  std::vector<Triple> triples_;
  std::vector<std::vector<TopicId>> adjacency_;
};

// Parses `head<TAB>relation<TAB>tail` lines; `#` lines and blank lines skipped.
KnowledgeGraph load_triples(std::istream& in);
void write_triples(const KnowledgeGraph& graph, std::ostream& out);

// Union of the anchors' neighbors minus `exclude`, sorted by id. When that is
// empty the exclusion is dropped and the raw union returned.
std::vector<TopicId> one_hop_candidates(const KnowledgeGraph& graph,
                                        std::span<const TopicId> anchors,
                                        std::span<const TopicId> exclude);

HopBall khop_ball(const KnowledgeGraph& graph, TopicId center, int radius);

// Exact BFS distance; -1 when unreachable.
int bfs_distance(const KnowledgeGraph& graph, TopicId from, TopicId to);
std::vector<int> bfs_distances(const KnowledgeGraph& graph, TopicId from);

}  // namespace proactive

template <>
struct std::hash<proactive::TopicId> {
  std::size_t operator()(proactive::TopicId t) const noexcept {
    return std::hash<std::uint32_t>{}(t.value);
  }
};
