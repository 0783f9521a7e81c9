// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace proactive {

// The four goal-weight factors, in MLP input order.
enum class Factor { kTurn = 0, kGcd = 1, kEus = 2, kCd = 3 };
inline constexpr std::size_t kFactorCount = 4;

std::string_view factor_name(Factor f) noexcept;
Factor factor_from_name(std::string_view name);  // throws ConfigError

// Factors that are replaced by the constant 0.5 at the MLP input.
using FactorMask = std::array<bool, kFactorCount>;

struct FactorVector {
  double turn_norm = 0.0;  // t / T
  double gcd_norm = 0.0;   // gcd_t / d_max
  double eus = 0.5;
  double cd = 0.5;

  std::array<double, kFactorCount> as_array() const { return {turn_norm, gcd_norm, eus, cd}; }
};

// Everything about a state the goal weight depends on. cd is not stored: it
// is recomputed from the cooperation sequence with the current parameters.
struct StateInputs {
  double turn_norm = 0.0;
  double gcd_norm = 0.0;
  double eus = 0.5;
  std::vector<int> cooperation;  // 0 = cooperative, 1 = non-cooperative
};

struct NetDims {
  int gru_hidden = 16;
  int mlp_hidden = 32;
  friend bool operator==(const NetDims&, const NetDims&) = default;
};

struct LayerInfo {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;
  std::size_t size() const noexcept { return rows * cols; }
  friend bool operator==(const LayerInfo&, const LayerInfo&) = default;
};

// Trainable goal-weight model over one flat parameter vector.
//   kProi:    GRU cooperation encoder + projection (cd), 4 -> H -> 1 MLP (gw)
//   kDegrade: gw = sigmoid(beta), a single parameter
class GoalWeightModel {
 public:
  enum class Kind { kProi, kDegrade };

  // Forward-pass intermediates kept for backpropagation.
  struct Trace {
    double gw = 0.5;
    double cd = 0.5;
    std::array<double, kFactorCount> inputs{};
    std::vector<double> hidden_pre;   // MLP hidden, before tanh
    std::vector<double> hidden;       // MLP hidden, after tanh
    // GRU per-step values, step-major; hs has one extra leading zero state.
    std::vector<double> hs, zs, rs, cands;
    std::vector<int> sequence;
  };

  static GoalWeightModel proi(NetDims dims, std::uint64_t seed, FactorMask disabled = {});
  static GoalWeightModel degrade(std::uint64_t seed);
  // Zero-filled parameters with the given layout; used by checkpoint loading.
  static GoalWeightModel empty(Kind kind, NetDims dims, FactorMask disabled = {});

  Kind kind() const noexcept { return kind_; }
  const NetDims& dims() const noexcept { return dims_; }
  const FactorMask& disabled() const noexcept { return disabled_; }
  const std::vector<LayerInfo>& layers() const noexcept { return layers_; }
  const LayerInfo& layer(std::string_view name) const;
  std::span<double> layer_values(std::string_view name);
  std::span<const double> layer_values(std::string_view name) const;

  std::vector<double>& params() noexcept { return params_; }
  const std::vector<double>& params() const noexcept { return params_; }

  // GRU over the 0/1 sequence from a zero state, then sigmoid projection.
  double cooperative_degree(std::span<const int> sequence) const;
  double goal_weight(const FactorVector& factors) const;

  Trace forward(const StateInputs& state) const;
  // Accumulates d(loss)/d(params) into `grad` given d(loss)/d(gw).
  void backward(const Trace& trace, double d_gw, std::span<double> grad) const;

  friend bool operator==(const GoalWeightModel&, const GoalWeightModel&) = default;

 private:
  GoalWeightModel(Kind kind, NetDims dims, FactorMask disabled);
  void add_layer(std::string name, std::size_t rows, std::size_t cols);
  const double* at(std::string_view name) const;
  void run_gru(std::span<const int> sequence, Trace* trace, double& cd) const;
  double run_mlp(const std::array<double, kFactorCount>& x, Trace* trace) const;

  Kind kind_;
  NetDims dims_;
  FactorMask disabled_{};
  std::vector<LayerInfo> layers_;
  std::vector<double> params_;
};

std::string_view kind_name(GoalWeightModel::Kind kind) noexcept;

double sigmoid(double x) noexcept;

}  // namespace proactive
