// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "proactive/graph.hpp"

namespace proactive {

// One row of `dim` reals per topic, stored row-major.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t rows, int dim);

  int dim() const noexcept { return dim_; }
  std::size_t rows() const noexcept { return rows_; }
  std::span<const double> row(TopicId id) const;
  std::span<double> row(TopicId id);
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

 private:
  std::size_t rows_ = 0;
  int dim_ = 0;
  std::vector<double> data_;
};

struct WalkParams {
  int walks_per_node = 10;
  int walk_length = 20;
  int window = 3;
  int negatives = 5;
  double learning_rate = 0.025;
  int epochs = 3;
  std::uint64_t seed = 1;
};

// Uniform random walks followed by skip-gram with negative sampling.
// Rows are L2-normalized on return.
EmbeddingTable train_embeddings(const KnowledgeGraph& graph, int dim,
                                const WalkParams& params);

// `label<TAB>v1<TAB>...<TAB>vd`, one line per topic.
EmbeddingTable load_embeddings(std::istream& in, const KnowledgeGraph& graph);
void write_embeddings(const EmbeddingTable& table, const KnowledgeGraph& graph,
                      std::ostream& out);

}  // namespace proactive
