// SPDX-License-Identifier: Apache-2.0
#include "proactive/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <random>
#include <string>

#include "proactive/errors.hpp"
#include "proactive/rng.hpp"

namespace proactive {

EmbeddingTable::EmbeddingTable(std::size_t rows, int dim)
    : rows_(rows), dim_(dim), data_(rows * static_cast<std::size_t>(dim), 0.0) {
  if (dim <= 0) throw ConfigError("embedding dim must be positive");
}

std::span<const double> EmbeddingTable::row(TopicId id) const {
  if (id.index() >= rows_) throw LookupError("no embedding row for topic " + std::to_string(id.value));
  return {data_.data() + id.index() * dim_, static_cast<std::size_t>(dim_)};
}

std::span<double> EmbeddingTable::row(TopicId id) {
  if (id.index() >= rows_) throw LookupError("no embedding row for topic " + std::to_string(id.value));
  return {data_.data() + id.index() * dim_, static_cast<std::size_t>(dim_)};
}

namespace {

double sigmoid(double x) {
  if (x > 30) return 1.0;
  if (x < -30) return 0.0;
  return 1.0 / (1.0 + std::exp(-x));
}

std::vector<std::vector<TopicId>> random_walks(const KnowledgeGraph& graph,
                                               const WalkParams& p, Rng& rng) {
  std::vector<std::vector<TopicId>> walks;
  const auto n = static_cast<std::uint32_t>(graph.topic_count());
  walks.reserve(static_cast<std::size_t>(n) * p.walks_per_node);
  std::vector<TopicId> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = TopicId{i};
  for (int w = 0; w < p.walks_per_node; ++w) {
    std::shuffle(order.begin(), order.end(), rng);
    for (TopicId start : order) {
      std::vector<TopicId> walk{start};
      while (static_cast<int>(walk.size()) < p.walk_length) {
        auto adj = graph.neighbors(walk.back());
        if (adj.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, adj.size() - 1);
        walk.push_back(adj[pick(rng)]);
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

}  // namespace

EmbeddingTable train_embeddings(const KnowledgeGraph& graph, int dim,
                                const WalkParams& p) {
  if (dim <= 0) throw ConfigError("embedding dim must be positive");
  if (graph.topic_count() == 0) throw ConfigError("cannot embed an empty graph");
  if (p.walks_per_node < 1 || p.walk_length < 1 || p.window < 1 || p.negatives < 0 ||
      p.epochs < 0 || !(p.learning_rate > 0))
    throw ConfigError("invalid random-walk parameters");

  Rng rng(p.seed);
  const std::size_t n = graph.topic_count();
  const auto d = static_cast<std::size_t>(dim);
  EmbeddingTable input(n, dim);
  std::vector<double> output(n * d, 0.0);
  {
    std::uniform_real_distribution<double> init(-0.5 / dim, 0.5 / dim);
    for (std::uint32_t i = 0; i < n; ++i)
      for (double& v : input.row(TopicId{i})) v = init(rng);
  }

  auto walks = random_walks(graph, p, rng);

  // Negative-sampling table: node frequency in the walks raised to 3/4.
  std::vector<double> freq(n, 0.0);
  for (const auto& w : walks)
    for (TopicId t : w) freq[t.index()] += 1.0;
  for (double& f : freq) f = std::pow(f, 0.75);
  std::discrete_distribution<std::uint32_t> negative(freq.begin(), freq.end());

  std::size_t total_pairs = 0;
  for (const auto& w : walks) total_pairs += w.size();
  total_pairs *= static_cast<std::size_t>(std::max(1, p.epochs));
  std::size_t processed = 0;

  std::vector<double> grad(d);
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    std::shuffle(walks.begin(), walks.end(), rng);
    for (const auto& walk : walks) {
      for (std::size_t c = 0; c < walk.size(); ++c) {
        const double lr = std::max(p.learning_rate * 1e-4,
                                   p.learning_rate * (1.0 - double(processed) / total_pairs));
        ++processed;
        const std::size_t lo = c >= std::size_t(p.window) ? c - p.window : 0;
        const std::size_t hi = std::min(walk.size() - 1, c + p.window);
        for (std::size_t o = lo; o <= hi; ++o) {
          if (o == c) continue;
          auto in = input.row(walk[c]);
          std::fill(grad.begin(), grad.end(), 0.0);
          for (int s = 0; s <= p.negatives; ++s) {
            TopicId target = s == 0 ? walk[o] : TopicId{negative(rng)};
            if (s > 0 && target == walk[o]) continue;
            const double label = s == 0 ? 1.0 : 0.0;
            double* out = output.data() + target.index() * d;
            double dot = 0.0;
            for (std::size_t k = 0; k < d; ++k) dot += in[k] * out[k];
            const double g = lr * (label - sigmoid(dot));
            for (std::size_t k = 0; k < d; ++k) {
              grad[k] += g * out[k];
              out[k] += g * in[k];
            }
          }
          for (std::size_t k = 0; k < d; ++k) in[k] += grad[k];
        }
      }
    }
  }

  for (std::uint32_t i = 0; i < n; ++i) {
    auto row = input.row(TopicId{i});
    double norm = 0.0;
    for (double v : row) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0)
      for (double& v : row) v /= norm;
  }
  return input;
}

EmbeddingTable load_embeddings(std::istream& in, const KnowledgeGraph& graph) {
  std::vector<std::vector<double>> rows(graph.topic_count());
  std::vector<bool> seen(graph.topic_count(), false);
  int dim = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "expected label and values");
    const std::string label = line.substr(0, tab);
    std::vector<double> values;
    std::size_t start = tab + 1;
    while (true) {
      auto next = line.find('\t', start);
      std::string field = line.substr(start, next - start);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
        throw ParseError(line_no, "non-numeric value '" + field + "'");
      values.push_back(v);
      if (next == std::string::npos) break;
      start = next + 1;
    }
    if (dim < 0) dim = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != dim)
      throw ParseError(line_no, "expected " + std::to_string(dim) + " values, got " +
                                    std::to_string(values.size()));
    if (!graph.contains(label)) throw ParseError(line_no, "unknown topic '" + label + "'");
    const auto id = graph.find(label);
    if (seen[id.index()]) throw ParseError(line_no, "duplicate topic '" + label + "'");
    seen[id.index()] = true;
    rows[id.index()] = std::move(values);
  }
  std::string missing;
  std::size_t missing_count = 0;
  for (std::uint32_t i = 0; i < graph.topic_count(); ++i) {
    if (seen[i]) continue;
    if (missing_count++ < 20) missing += (missing.empty() ? "" : ", ") + graph.label(TopicId{i});
  }
  if (missing_count > 0)
    throw CoverageError("embeddings missing for " + std::to_string(missing_count) +
                        " topic(s): " + missing + (missing_count > 20 ? ", ..." : ""));
  if (dim <= 0) throw ParseError(line_no, "no embedding values");
  EmbeddingTable table(graph.topic_count(), dim);
  for (std::uint32_t i = 0; i < graph.topic_count(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), table.row(TopicId{i}).begin());
  return table;
}

void write_embeddings(const EmbeddingTable& table, const KnowledgeGraph& graph,
                      std::ostream& out) {
  out << std::setprecision(17);
  for (std::uint32_t i = 0; i < table.rows(); ++i) {
    out << graph.label(TopicId{i});
    for (double v : table.row(TopicId{i})) out << '\t' << v;
    out << '\n';
  }
}

}  // namespace proactive
