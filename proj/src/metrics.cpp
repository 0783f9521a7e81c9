// SPDX-License-Identifier: Apache-2.0
#include "proactive/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "proactive/errors.hpp"

namespace proactive {

double gcr(std::span<const EpisodeRecord> records, double lambda_decay) {
  if (records.empty()) throw MetricUndefinedError("GCR of an empty episode set");
  double sum = 0.0;
  for (const auto& r : records)
    if (r.success()) sum += std::exp(-lambda_decay * r.turn_count());
  return sum / static_cast<double>(records.size());
}

double episode_us(const EpisodeRecord& record) {
  if (record.turns.empty()) return 0.0;
  double total = 0.0;
  for (const auto& t : record.turns) {
    double sum = t.agent_preference;
    int count = 1;
    if (t.response)
      if (const auto* n = std::get_if<NonCooperative>(&*t.response))
        for (const auto& m : n->mentions)
          if (m.topic != t.agent_topic) {
            sum += m.preference;
            ++count;
          }
    total += sum / count;
  }
  return total / static_cast<double>(record.turns.size());
}

double us_metric(std::span<const EpisodeRecord> records) {
  if (records.empty()) throw MetricUndefinedError("US of an empty episode set");
  double sum = 0.0;
  for (const auto& r : records) sum += episode_us(r);
  return sum / static_cast<double>(records.size());
}

bool dominates(const MetricPair& a, const MetricPair& b) noexcept {
  return a.gcr >= b.gcr && a.us >= b.us && (a.gcr > b.gcr || a.us > b.us);
}

RoundResultSet pareto_report(std::span<const MetricPair> rounds) {
  if (rounds.empty()) throw MetricUndefinedError("no evaluation rounds");
  RoundResultSet out;
  out.rounds.assign(rounds.begin(), rounds.end());
  // Sweep by gcr descending: a point survives when its us beats every point
  // with strictly larger gcr, and no equal-gcr point has larger us.
  std::vector<std::size_t> order(rounds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rounds[a].gcr != rounds[b].gcr) return rounds[a].gcr > rounds[b].gcr;
    return rounds[a].us > rounds[b].us;
  });
  std::vector<bool> on_front(rounds.size(), false);
  double best_us_above = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < order.size()) {
    // Group of equal gcr; its max us is at the group head.
    std::size_t j = i;
    const double g = rounds[order[i]].gcr;
    const double group_max_us = rounds[order[i]].us;
    while (j < order.size() && rounds[order[j]].gcr == g) {
      const double u = rounds[order[j]].us;
      if (u == group_max_us && u > best_us_above) on_front[order[j]] = true;
      ++j;
    }
    best_us_above = std::max(best_us_above, group_max_us);
    i = j;
  }
  for (std::size_t k = 0; k < rounds.size(); ++k)
    if (on_front[k]) out.pareto_front.push_back(rounds[k]);

  for (const auto& m : out.pareto_front) {
    out.reported.gcr += m.gcr;
    out.reported.us += m.us;
  }
  out.reported.gcr /= static_cast<double>(out.pareto_front.size());
  out.reported.us /= static_cast<double>(out.pareto_front.size());

  std::vector<double> g, u;
  for (const auto& m : rounds) {
    g.push_back(m.gcr);
    u.push_back(m.us);
  }
  const auto sg = summarize(g);
  const auto su = summarize(u);
  out.mean = {sg.mean, su.mean};
  out.sd = {sg.sd, su.sd};
  return out;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) return {};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("pearson inputs differ in length");
  if (x.size() < 3) throw MetricUndefinedError("correlation needs at least 3 pairs");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return {0.0, true};
  return {sxy / std::sqrt(sxx * syy), false};
}

}  // namespace proactive
