// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "proactive/episode.hpp"

namespace proactive {

struct MetricPair {
  double gcr = 0.0;
  double us = 0.0;
  friend bool operator==(const MetricPair&, const MetricPair&) = default;
};

// (1/N) sum exp(-lambda T_k) D_k
double gcr(std::span<const EpisodeRecord> records, double lambda_decay);

// Per turn: mean true preference over the distinct topics of the turn
// (agent topic plus mentions). Averaged over turns, then over episodes.
double episode_us(const EpisodeRecord& record);
double us_metric(std::span<const EpisodeRecord> records);

// `a` dominates `b`: >= on both metrics and > on at least one.
bool dominates(const MetricPair& a, const MetricPair& b) noexcept;

struct RoundResultSet {
  std::vector<MetricPair> rounds;
  std::vector<MetricPair> pareto_front;  // in round order
  MetricPair reported;                   // component-wise mean of the front
  MetricPair mean;
  MetricPair sd;  // population standard deviation over rounds
};

RoundResultSet pareto_report(std::span<const MetricPair> rounds);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
};

Summary summarize(std::span<const double> values);

struct Correlation {
  double r = 0.0;
  bool degenerate = false;  // zero variance; r reported as 0
};

// Pearson coefficient; throws MetricUndefinedError for fewer than 3 pairs.
Correlation pearson(std::span<const double> x, std::span<const double> y);

}  // namespace proactive
