// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <vector>

#include "proactive/embeddings.hpp"
#include "proactive/graph.hpp"

namespace proactive {

// Observed preferences; values clamped to [0,1], latest observation wins.
class ObservationSet {
 public:
  void observe(TopicId topic, double preference);
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<TopicId, double>& entries() const noexcept { return entries_; }

 private:
  std::map<TopicId, double> entries_;
};

struct RidgeOptions {
  double beta = 0.01;
  double max_condition = 1e12;
  // Gradient-descent fallback schedule.
  double gd_learning_rate = 0.05;
  int gd_iterations = 500;
  double gd_tolerance = 1e-8;
};

enum class RidgeSolver { kNormalEquation, kGradientDescent };

struct RidgeFit {
  std::vector<double> user_vector;
  RidgeSolver solver = RidgeSolver::kNormalEquation;
  double condition = 1.0;
};

// Raw least-squares problem: `rows` holds targets.size() row-major rows of
// `dim` reals. Targets are taken as given (no clamping).
struct RidgeProblem {
  int dim = 0;
  std::vector<double> rows;
  std::vector<double> targets;
};

RidgeFit solve_ridge(const RidgeProblem& problem, const RidgeOptions& options);

// u = (E^T E + beta I)^-1 E^T p over the observed rows, with a
// gradient-descent fallback when the system is ill-conditioned.
// An empty observation set yields the zero vector.
RidgeFit fit_ridge(const ObservationSet& obs, const EmbeddingTable& embeddings,
                   const RidgeOptions& options);
std::vector<double> fit_user_vector(const ObservationSet& obs, const EmbeddingTable& embeddings,
                                    double ridge_beta);
// The fallback path on its own; exposed so both routes can be compared.
std::vector<double> fit_user_vector_gd(const ObservationSet& obs,
                                       const EmbeddingTable& embeddings,
                                       const RidgeOptions& options);

struct EstimatedPreferences {
  std::vector<double> values;       // one per topic, in [0,1]
  std::vector<bool> observed_mask;
  std::vector<double> user_vector;

  double at(TopicId t) const { return values.at(t.index()); }
};

inline constexpr double kColdStartPreference = 0.5;

// Observed topics pass through; the rest get clamp(row . u, 0, 1). With no
// observations every topic gets the cold-start value 0.5.
EstimatedPreferences assemble_preferences(const ObservationSet& obs,
                                          const std::vector<double>& user_vector,
                                          const EmbeddingTable& embeddings);

EstimatedPreferences estimate_preferences(const ObservationSet& obs,
                                          const EmbeddingTable& embeddings,
                                          const RidgeOptions& options);

}  // namespace proactive
