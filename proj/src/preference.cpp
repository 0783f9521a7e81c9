// SPDX-License-Identifier: Apache-2.0
#include "proactive/preference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "proactive/errors.hpp"

namespace proactive {

void ObservationSet::observe(TopicId topic, double preference) {
  entries_[topic] = std::clamp(preference, 0.0, 1.0);
}

namespace {

struct Design {
  Eigen::MatrixXd rows;  // n_obs x d
  Eigen::VectorXd targets;
};

Design design_matrix(const ObservationSet& obs, const EmbeddingTable& emb) {
  const int d = emb.dim();
  Design out{Eigen::MatrixXd(static_cast<Eigen::Index>(obs.size()), d),
             Eigen::VectorXd(static_cast<Eigen::Index>(obs.size()))};
  Eigen::Index r = 0;
  for (const auto& [topic, p] : obs.entries()) {
    auto row = emb.row(topic);
    for (int k = 0; k < d; ++k) out.rows(r, k) = row[k];
    out.targets(r) = p;
    ++r;
  }
  return out;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Upper bound on the largest eigenvalue of a PSD matrix: the smaller of the
// trace and the Gershgorin row bound.
double largest_eigenvalue(const Eigen::MatrixXd& gram) {
  const double gershgorin = gram.cwiseAbs().rowwise().sum().maxCoeff();
  return std::min(gram.trace(), gershgorin);
}

Eigen::VectorXd gradient_descent(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs,
                                 double lipschitz, const RidgeOptions& opt) {
  // Objective 1/2 u^T G u - rhs^T u with G = E^T E + beta I. The step is
  // capped at 1/L so the iteration cannot diverge on large observation sets.
  const double step = std::min(opt.gd_learning_rate, lipschitz > 0 ? 1.0 / lipschitz : opt.gd_learning_rate);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(rhs.size());
  for (int it = 0; it < opt.gd_iterations; ++it) {
    Eigen::VectorXd grad = gram * u - rhs;
    if (grad.lpNorm<Eigen::Infinity>() < opt.gd_tolerance) break;
    u -= step * grad;
  }
  return u;
}

}  // namespace

namespace {

RidgeFit solve(const Eigen::MatrixXd& rows, const Eigen::VectorXd& targets,
               const RidgeOptions& opt) {
  Eigen::MatrixXd gram = rows.transpose() * rows;
  gram.diagonal().array() += opt.beta;
  const Eigen::VectorXd rhs = rows.transpose() * targets;

  // LDLT's rcond estimate stays finite on exactly singular matrices because
  // its solve zeroes null pivots, so the spectrum decides instead.
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double cond = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();

  RidgeFit fit;
  fit.condition = cond;
  if (cond <= opt.max_condition) {
    fit.user_vector = to_vector(ldlt.solve(rhs));
    fit.solver = RidgeSolver::kNormalEquation;
  } else {
    fit.user_vector = to_vector(gradient_descent(gram, rhs, largest_eigenvalue(gram), opt));
    fit.solver = RidgeSolver::kGradientDescent;
  }
  return fit;
}

void check_options(const RidgeOptions& opt) {
  if (!(opt.beta >= 0)) throw ConfigError("ridge beta must be non-negative");
}

}  // namespace

RidgeFit solve_ridge(const RidgeProblem& problem, const RidgeOptions& opt) {
  check_options(opt);
  const int d = problem.dim;
  if (d <= 0) throw ConfigError("ridge problem has no columns");
  const auto n = static_cast<Eigen::Index>(problem.targets.size());
  if (problem.rows.size() != static_cast<std::size_t>(n) * d)
    throw ConfigError("ridge rows do not match targets x dim");
  if (n == 0) return {std::vector<double>(d, 0.0), RidgeSolver::kNormalEquation, 1.0};
  Eigen::MatrixXd rows(n, d);
  for (Eigen::Index r = 0; r < n; ++r)
    for (int k = 0; k < d; ++k) rows(r, k) = problem.rows[r * d + k];
  Eigen::VectorXd targets = Eigen::Map<const Eigen::VectorXd>(problem.targets.data(), n);
  return solve(rows, targets, opt);
}

RidgeFit fit_ridge(const ObservationSet& obs, const EmbeddingTable& emb,
                   const RidgeOptions& opt) {
  check_options(opt);
  const int d = emb.dim();
  if (d <= 0) throw ConfigError("embedding table has no columns");
  if (obs.empty()) return {std::vector<double>(d, 0.0), RidgeSolver::kNormalEquation, 1.0};
  for (const auto& [topic, p] : obs.entries())
    if (topic.index() >= emb.rows())
      throw ConfigError("observation topic outside the embedding table");
  const Design des = design_matrix(obs, emb);
  return solve(des.rows, des.targets, opt);
}

std::vector<double> fit_user_vector(const ObservationSet& obs, const EmbeddingTable& emb,
                                    double ridge_beta) {
  RidgeOptions opt;
  opt.beta = ridge_beta;
  return fit_ridge(obs, emb, opt).user_vector;
}

std::vector<double> fit_user_vector_gd(const ObservationSet& obs, const EmbeddingTable& emb,
                                       const RidgeOptions& opt) {
  if (obs.empty()) return std::vector<double>(emb.dim(), 0.0);
  const Design des = design_matrix(obs, emb);
  Eigen::MatrixXd gram = des.rows.transpose() * des.rows;
  gram.diagonal().array() += opt.beta;
  const Eigen::VectorXd rhs = des.rows.transpose() * des.targets;
  return to_vector(gradient_descent(gram, rhs, largest_eigenvalue(gram), opt));
}

EstimatedPreferences assemble_preferences(const ObservationSet& obs,
                                          const std::vector<double>& u,
                                          const EmbeddingTable& emb) {
  if (static_cast<int>(u.size()) != emb.dim())
    throw ConfigError("user vector dimension does not match the embeddings");
  const std::size_t n = emb.rows();
  EstimatedPreferences out;
  out.user_vector = u;
  out.values.assign(n, kColdStartPreference);
  out.observed_mask.assign(n, false);
  if (!obs.empty()) {
    for (std::uint32_t i = 0; i < n; ++i) {
      auto row = emb.row(TopicId{i});
      double dot = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) dot += row[k] * u[k];
      out.values[i] = std::clamp(dot, 0.0, 1.0);
    }
  }
  for (const auto& [topic, p] : obs.entries()) {
    out.values.at(topic.index()) = p;
    out.observed_mask[topic.index()] = true;
  }
  return out;
}

EstimatedPreferences estimate_preferences(const ObservationSet& obs,
                                          const EmbeddingTable& emb,
                                          const RidgeOptions& options) {
  return assemble_preferences(obs, fit_ridge(obs, emb, options).user_vector, emb);
}

}  // namespace proactive
