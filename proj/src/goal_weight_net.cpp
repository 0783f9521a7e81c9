// SPDX-License-Identifier: Apache-2.0
#include "proactive/goal_weight_net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "proactive/errors.hpp"
#include "proactive/rng.hpp"

namespace proactive {

namespace {

constexpr double kInitRange = 0.08;
constexpr double kDisabledInput = 0.5;

}  // namespace

// Clamped so saturated logits still give a value strictly inside (0,1).
double sigmoid(double x) noexcept {
  constexpr double kLo = std::numeric_limits<double>::min();
  constexpr double kHi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  if (x >= 0) return std::min(1.0 / (1.0 + std::exp(-x)), kHi);
  const double e = std::exp(x);
  return std::max(e / (1.0 + e), kLo);
}

std::string_view factor_name(Factor f) noexcept {
  switch (f) {
    case Factor::kTurn: return "turn";
    case Factor::kGcd: return "gcd";
    case Factor::kEus: return "eus";
    case Factor::kCd: return "cd";
  }
  return "turn";
}

Factor factor_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFactorCount; ++i)
    if (factor_name(static_cast<Factor>(i)) == name) return static_cast<Factor>(i);
  throw ConfigError("unknown factor '" + std::string(name) + "'");
}

std::string_view kind_name(GoalWeightModel::Kind kind) noexcept {
  return kind == GoalWeightModel::Kind::kProi ? "proi" : "degrade";
}

GoalWeightModel::GoalWeightModel(Kind kind, NetDims dims, FactorMask disabled)
    : kind_(kind), dims_(dims), disabled_(disabled) {
  if (kind == Kind::kDegrade) {
    dims_ = NetDims{0, 0};
    disabled_ = {};
    add_layer("beta", 1, 1);
  } else {
    if (dims.gru_hidden < 1 || dims.mlp_hidden < 1)
      throw ConfigError("network dimensions must be positive");
    const auto h = static_cast<std::size_t>(dims.gru_hidden);
    const auto m = static_cast<std::size_t>(dims.mlp_hidden);
    for (const char* gate : {"z", "r", "h"}) {
      add_layer(std::string("gru.w_") + gate, h, 1);
      add_layer(std::string("gru.u_") + gate, h, h);
      add_layer(std::string("gru.b_") + gate, h, 1);
    }
    add_layer("cd.w", 1, h);
    add_layer("cd.b", 1, 1);
    add_layer("mlp.w1", m, kFactorCount);
    add_layer("mlp.b1", m, 1);
    add_layer("mlp.w2", 1, m);
    add_layer("mlp.b2", 1, 1);
  }
  params_.assign(layers_.empty() ? 0 : layers_.back().offset + layers_.back().size(), 0.0);
}

void GoalWeightModel::add_layer(std::string name, std::size_t rows, std::size_t cols) {
  const std::size_t offset = layers_.empty() ? 0 : layers_.back().offset + layers_.back().size();
  layers_.push_back({std::move(name), rows, cols, offset});
}

GoalWeightModel GoalWeightModel::proi(NetDims dims, std::uint64_t seed, FactorMask disabled) {
  GoalWeightModel m(Kind::kProi, dims, disabled);
  Rng rng(seed);
  std::uniform_real_distribution<double> init(-kInitRange, kInitRange);
  for (double& p : m.params_) p = init(rng);
  return m;
}

GoalWeightModel GoalWeightModel::degrade(std::uint64_t seed) {
  GoalWeightModel m(Kind::kDegrade, {}, {});
  Rng rng(seed);
  std::uniform_real_distribution<double> init(-kInitRange, kInitRange);
  m.params_[0] = init(rng);
  return m;
}

GoalWeightModel GoalWeightModel::empty(Kind kind, NetDims dims, FactorMask disabled) {
  return GoalWeightModel(kind, dims, disabled);
}

const LayerInfo& GoalWeightModel::layer(std::string_view name) const {
  for (const auto& l : layers_)
    if (l.name == name) return l;
  throw LookupError("no layer named '" + std::string(name) + "'");
}

std::span<double> GoalWeightModel::layer_values(std::string_view name) {
  const auto& l = layer(name);
  return {params_.data() + l.offset, l.size()};
}

std::span<const double> GoalWeightModel::layer_values(std::string_view name) const {
  const auto& l = layer(name);
  return {params_.data() + l.offset, l.size()};
}

const double* GoalWeightModel::at(std::string_view name) const {
  return params_.data() + layer(name).offset;
}

void GoalWeightModel::run_gru(std::span<const int> seq, Trace* trace, double& cd) const {
  const std::size_t h = dims_.gru_hidden;
  const double* wz = at("gru.w_z");
  const double* uz = at("gru.u_z");
  const double* bz = at("gru.b_z");
  const double* wr = at("gru.w_r");
  const double* ur = at("gru.u_r");
  const double* br = at("gru.b_r");
  const double* wh = at("gru.w_h");
  const double* uh = at("gru.u_h");
  const double* bh = at("gru.b_h");

  std::vector<double> state(h, 0.0), next(h), z(h), r(h), cand(h), rh(h);
  if (trace) {
    trace->sequence.assign(seq.begin(), seq.end());
    trace->hs.assign(state.begin(), state.end());
    trace->zs.clear();
    trace->rs.clear();
    trace->cands.clear();
  }
  for (int x_int : seq) {
    if (x_int != 0 && x_int != 1) throw InputError("cooperation sequence must be binary");
    const double x = x_int;
    for (std::size_t i = 0; i < h; ++i) {
      double az = wz[i] * x + bz[i];
      double ar = wr[i] * x + br[i];
      for (std::size_t j = 0; j < h; ++j) {
        az += uz[i * h + j] * state[j];
        ar += ur[i * h + j] * state[j];
      }
      z[i] = sigmoid(az);
      r[i] = sigmoid(ar);
    }
    for (std::size_t j = 0; j < h; ++j) rh[j] = r[j] * state[j];
    for (std::size_t i = 0; i < h; ++i) {
      double ah = wh[i] * x + bh[i];
      for (std::size_t j = 0; j < h; ++j) ah += uh[i * h + j] * rh[j];
      cand[i] = std::tanh(ah);
      next[i] = (1.0 - z[i]) * state[i] + z[i] * cand[i];
    }
    state.swap(next);
    if (trace) {
      trace->hs.insert(trace->hs.end(), state.begin(), state.end());
      trace->zs.insert(trace->zs.end(), z.begin(), z.end());
      trace->rs.insert(trace->rs.end(), r.begin(), r.end());
      trace->cands.insert(trace->cands.end(), cand.begin(), cand.end());
    }
  }
  const double* w = at("cd.w");
  double a = at("cd.b")[0];
  for (std::size_t i = 0; i < h; ++i) a += w[i] * state[i];
  cd = sigmoid(a);
}

double GoalWeightModel::run_mlp(const std::array<double, kFactorCount>& x, Trace* trace) const {
  const std::size_t m = dims_.mlp_hidden;
  const double* w1 = at("mlp.w1");
  const double* b1 = at("mlp.b1");
  const double* w2 = at("mlp.w2");
  double out = at("mlp.b2")[0];
  if (trace) {
    trace->hidden_pre.resize(m);
    trace->hidden.resize(m);
  }
  for (std::size_t i = 0; i < m; ++i) {
    double pre = b1[i];
    for (std::size_t k = 0; k < kFactorCount; ++k) pre += w1[i * kFactorCount + k] * x[k];
    const double act = std::tanh(pre);
    if (trace) {
      trace->hidden_pre[i] = pre;
      trace->hidden[i] = act;
    }
    out += w2[i] * act;
  }
  return sigmoid(out);
}

double GoalWeightModel::cooperative_degree(std::span<const int> sequence) const {
  if (kind_ != Kind::kProi) throw ContractError("degrade model has no cooperation encoder");
  double cd = 0.5;
  run_gru(sequence, nullptr, cd);
  return cd;
}

double GoalWeightModel::goal_weight(const FactorVector& f) const {
  if (kind_ == Kind::kDegrade) return sigmoid(params_[0]);
  auto x = f.as_array();
  for (std::size_t k = 0; k < kFactorCount; ++k)
    if (disabled_[k]) x[k] = kDisabledInput;
  return run_mlp(x, nullptr);
}

GoalWeightModel::Trace GoalWeightModel::forward(const StateInputs& s) const {
  Trace t;
  if (kind_ == Kind::kDegrade) {
    t.gw = sigmoid(params_[0]);
    return t;
  }
  const bool cd_on = !disabled_[static_cast<std::size_t>(Factor::kCd)];
  if (cd_on) run_gru(s.cooperation, &t, t.cd);
  t.inputs = {s.turn_norm, s.gcd_norm, s.eus, t.cd};
  for (std::size_t k = 0; k < kFactorCount; ++k)
    if (disabled_[k]) t.inputs[k] = kDisabledInput;
  t.gw = run_mlp(t.inputs, &t);
  return t;
}

void GoalWeightModel::backward(const Trace& t, double d_gw, std::span<double> grad) const {
  if (grad.size() != params_.size()) throw ContractError("gradient buffer size mismatch");
  const double d_out = d_gw * t.gw * (1.0 - t.gw);
  if (kind_ == Kind::kDegrade) {
    grad[0] += d_out;
    return;
  }

  const std::size_t m = dims_.mlp_hidden;
  const double* w1 = at("mlp.w1");
  const double* w2 = at("mlp.w2");
  double* g_w1 = grad.data() + layer("mlp.w1").offset;
  double* g_b1 = grad.data() + layer("mlp.b1").offset;
  double* g_w2 = grad.data() + layer("mlp.w2").offset;
  grad[layer("mlp.b2").offset] += d_out;
  double d_cd = 0.0;
  constexpr std::size_t cd_idx = static_cast<std::size_t>(Factor::kCd);
  for (std::size_t i = 0; i < m; ++i) {
    g_w2[i] += d_out * t.hidden[i];
    const double d_pre = d_out * w2[i] * (1.0 - t.hidden[i] * t.hidden[i]);
    g_b1[i] += d_pre;
    for (std::size_t k = 0; k < kFactorCount; ++k) g_w1[i * kFactorCount + k] += d_pre * t.inputs[k];
    d_cd += d_pre * w1[i * kFactorCount + cd_idx];
  }
  if (disabled_[cd_idx]) return;

  // cd = sigmoid(w . h_T + b)
  const std::size_t h = dims_.gru_hidden;
  const std::size_t steps = t.sequence.size();
  const double d_a = d_cd * t.cd * (1.0 - t.cd);
  const double* w_cd = at("cd.w");
  double* g_wcd = grad.data() + layer("cd.w").offset;
  grad[layer("cd.b").offset] += d_a;
  const double* h_last = t.hs.data() + steps * h;
  std::vector<double> dh(h), dh_prev(h), da_z(h), da_r(h), da_h(h), d_rh(h);
  for (std::size_t i = 0; i < h; ++i) {
    g_wcd[i] += d_a * h_last[i];
    dh[i] = d_a * w_cd[i];
  }

  const double* uz = at("gru.u_z");
  const double* ur = at("gru.u_r");
  const double* uh = at("gru.u_h");
  double* g_wz = grad.data() + layer("gru.w_z").offset;
  double* g_uz = grad.data() + layer("gru.u_z").offset;
  double* g_bz = grad.data() + layer("gru.b_z").offset;
  double* g_wr = grad.data() + layer("gru.w_r").offset;
  double* g_ur = grad.data() + layer("gru.u_r").offset;
  double* g_br = grad.data() + layer("gru.b_r").offset;
  double* g_wh = grad.data() + layer("gru.w_h").offset;
  double* g_uh = grad.data() + layer("gru.u_h").offset;
  double* g_bh = grad.data() + layer("gru.b_h").offset;

  for (std::size_t s = steps; s-- > 0;) {
    const double x = t.sequence[s];
    const double* hp = t.hs.data() + s * h;  // state entering step s
    const double* z = t.zs.data() + s * h;
    const double* r = t.rs.data() + s * h;
    const double* c = t.cands.data() + s * h;
    for (std::size_t i = 0; i < h; ++i) {
      da_z[i] = dh[i] * (c[i] - hp[i]) * z[i] * (1.0 - z[i]);
      da_h[i] = dh[i] * z[i] * (1.0 - c[i] * c[i]);
      dh_prev[i] = dh[i] * (1.0 - z[i]);
    }
    for (std::size_t j = 0; j < h; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < h; ++i) acc += uh[i * h + j] * da_h[i];
      d_rh[j] = acc;
    }
    for (std::size_t j = 0; j < h; ++j) {
      da_r[j] = d_rh[j] * hp[j] * r[j] * (1.0 - r[j]);
      dh_prev[j] += d_rh[j] * r[j];
    }
    for (std::size_t i = 0; i < h; ++i) {
      g_wz[i] += da_z[i] * x;
      g_bz[i] += da_z[i];
      g_wr[i] += da_r[i] * x;
      g_br[i] += da_r[i];
      g_wh[i] += da_h[i] * x;
      g_bh[i] += da_h[i];
      for (std::size_t j = 0; j < h; ++j) {
        g_uz[i * h + j] += da_z[i] * hp[j];
        g_ur[i * h + j] += da_r[i] * hp[j];
        g_uh[i * h + j] += da_h[i] * r[j] * hp[j];
        dh_prev[j] += uz[i * h + j] * da_z[i] + ur[i * h + j] * da_r[i];
      }
    }
    dh.swap(dh_prev);
  }
}

}  // namespace proactive
