// SPDX-License-Identifier: Apache-2.0
#include "proactive/graph.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <set>
#include <sstream>

#include "proactive/errors.hpp"

namespace proactive {

TopicId KnowledgeGraph::Builder::add_topic(const std::string& label) {
  auto it = topic_index_.find(label);
  if (it != topic_index_.end()) return it->second;
  TopicId id{static_cast<std::uint32_t>(labels_.size())};
  labels_.push_back(label);
  topic_index_.emplace(label, id);
  return id;
}

std::uint32_t KnowledgeGraph::Builder::add_relation(const std::string& label) {
  auto it = relation_index_.find(label);
  if (it != relation_index_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(relations_.size());
  relations_.push_back(label);
  relation_index_.emplace(label, id);
  return id;
}

void KnowledgeGraph::Builder::add_triple(const std::string& head,
                                         const std::string& relation,
                                         const std::string& tail) {
  TopicId h = add_topic(head);
  std::uint32_t r = add_relation(relation);
  TopicId t = add_topic(tail);
  if (h == t) return;
  triples_.push_back({h, r, t});
}

KnowledgeGraph KnowledgeGraph::Builder::build() && {
  KnowledgeGraph g;
  // Keep first-appearance order of triples while dropping repeats.
  std::set<Triple> seen;
  for (const auto& tr : triples_)
    if (seen.insert(tr).second) g.triples_.push_back(tr);
  g.labels_ = std::move(labels_);
  g.topic_index_ = std::move(topic_index_);
  g.relations_ = std::move(relations_);
  g.adjacency_.resize(g.labels_.size());
  for (const auto& tr : g.triples_) {
    g.adjacency_[tr.head.index()].push_back(tr.tail);
    g.adjacency_[tr.tail.index()].push_back(tr.head);
  }
  for (auto& adj : g.adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return g;
}

const std::string& KnowledgeGraph::label(TopicId id) const {
  if (!contains(id)) throw LookupError("unknown topic id " + std::to_string(id.value));
  return labels_[id.index()];
}

const std::string& KnowledgeGraph::relation_label(std::uint32_t rel) const {
  if (rel >= relations_.size())
    throw LookupError("unknown relation id " + std::to_string(rel));
  return relations_[rel];
}

TopicId KnowledgeGraph::find(const std::string& label) const {
  auto it = topic_index_.find(label);
  if (it == topic_index_.end()) throw LookupError("unknown topic '" + label + "'");
  return it->second;
}

bool KnowledgeGraph::contains(const std::string& label) const {
  return topic_index_.contains(label);
}

std::span<const TopicId> KnowledgeGraph::neighbors(TopicId id) const {
  if (!contains(id)) throw LookupError("unknown topic id " + std::to_string(id.value));
  return adjacency_[id.index()];
}

std::size_t KnowledgeGraph::edge_count() const noexcept {
  std::size_t n = 0;
  for (const auto& adj : adjacency_) n += adj.size();
  return n / 2;
}

KnowledgeGraph load_triples(std::istream& in) {
  KnowledgeGraph::Builder builder;
  std::string line;
  std::size_t line_no = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3)
      throw ParseError(line_no, "expected 3 TAB-separated fields, got " +
                                    std::to_string(fields.size()));
    for (const auto& f : fields)
      if (f.empty()) throw ParseError(line_no, "empty field");
    builder.add_triple(fields[0], fields[1], fields[2]);
    any = true;
  }
  if (!any) throw EmptyGraphError();
  return std::move(builder).build();
}

void write_triples(const KnowledgeGraph& graph, std::ostream& out) {
  for (const auto& tr : graph.triples())
    out << graph.label(tr.head) << '\t' << graph.relation_label(tr.relation) << '\t'
        << graph.label(tr.tail) << '\n';
}

std::vector<TopicId> one_hop_candidates(const KnowledgeGraph& graph,
                                        std::span<const TopicId> anchors,
                                        std::span<const TopicId> exclude) {
  std::vector<TopicId> all;
  for (TopicId a : anchors) {
    auto adj = graph.neighbors(a);
    all.insert(all.end(), adj.begin(), adj.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<TopicId> excl(exclude.begin(), exclude.end());
  std::sort(excl.begin(), excl.end());
  std::vector<TopicId> kept;
  std::set_difference(all.begin(), all.end(), excl.begin(), excl.end(),
                      std::back_inserter(kept));
  return kept.empty() ? all : kept;
}

HopBall khop_ball(const KnowledgeGraph& graph, TopicId center, int radius) {
  if (!graph.contains(center))
    throw LookupError("unknown topic id " + std::to_string(center.value));
  HopBall ball{{center, 0}};
  std::vector<TopicId> frontier{center};
  for (int d = 1; d <= radius && !frontier.empty(); ++d) {
    std::vector<TopicId> next;
    for (TopicId u : frontier)
      for (TopicId v : graph.neighbors(u))
        if (ball.emplace(v, d).second) next.push_back(v);
    frontier = std::move(next);
  }
  return ball;
}

std::vector<int> bfs_distances(const KnowledgeGraph& graph, TopicId from) {
  if (!graph.contains(from))
    throw LookupError("unknown topic id " + std::to_string(from.value));
  std::vector<int> dist(graph.topic_count(), -1);
  std::deque<TopicId> queue{from};
  dist[from.index()] = 0;
  while (!queue.empty()) {
    TopicId u = queue.front();
    queue.pop_front();
    for (TopicId v : graph.neighbors(u)) {
      if (dist[v.index()] >= 0) continue;
      dist[v.index()] = dist[u.index()] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

int bfs_distance(const KnowledgeGraph& graph, TopicId from, TopicId to) {
  if (!graph.contains(to)) throw LookupError("unknown topic id " + std::to_string(to.value));
  return bfs_distances(graph, from)[to.index()];
}

}  // namespace proactive
