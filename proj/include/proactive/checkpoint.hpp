// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>

#include "proactive/goal_weight_net.hpp"

namespace proactive {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  GoalWeightModel model;
  std::uint64_t step_count = 0;
};

// JSON document: format_version, kind, dims, disabled_factors, one entry per
// layer in declared order, step_count. Doubles round-trip exactly.
void write_checkpoint(const Checkpoint& ckpt, std::ostream& out);
// Throws ShapeError when arrays disagree with the declared dims, or when
// `expected_kind` is given and differs.
Checkpoint read_checkpoint(std::istream& in,
                           std::optional<GoalWeightModel::Kind> expected_kind = std::nullopt);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<GoalWeightModel::Kind> expected_kind = std::nullopt);

}  // namespace proactive
