// SPDX-License-Identifier: Apache-2.0
#include "proactive/checkpoint.hpp"

#include <fstream>
#include <json.hpp>

#include "proactive/errors.hpp"

namespace proactive {

using nlohmann::json;

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  const auto& m = ckpt.model;
  json doc;
  doc["format_version"] = kCheckpointFormatVersion;
  doc["kind"] = std::string(kind_name(m.kind()));
  doc["dims"] = {{"gru_hidden", m.dims().gru_hidden},
                 {"mlp_hidden", m.dims().mlp_hidden},
                 {"inputs", kFactorCount}};
  json disabled = json::array();
  for (std::size_t k = 0; k < kFactorCount; ++k)
    if (m.disabled()[k]) disabled.push_back(std::string(factor_name(static_cast<Factor>(k))));
  doc["disabled_factors"] = disabled;
  json layers = json::array();
  for (const auto& l : m.layers()) {
    auto values = m.layer_values(l.name);
    layers.push_back({{"name", l.name},
                      {"shape", {l.rows, l.cols}},
                      {"values", std::vector<double>(values.begin(), values.end())}});
  }
  doc["layers"] = layers;
  doc["step_count"] = ckpt.step_count;
  out << doc.dump(1) << '\n';
}

Checkpoint read_checkpoint(std::istream& in, std::optional<GoalWeightModel::Kind> expected_kind) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != kCheckpointFormatVersion)
      throw DataError("unsupported checkpoint format_version");
    const auto kind_str = doc.at("kind").get<std::string>();
    GoalWeightModel::Kind kind;
    if (kind_str == "proi")
      kind = GoalWeightModel::Kind::kProi;
    else if (kind_str == "degrade")
      kind = GoalWeightModel::Kind::kDegrade;
    else
      throw DataError("unknown checkpoint kind '" + kind_str + "'");
    if (expected_kind && *expected_kind != kind)
      throw ShapeError("checkpoint holds a '" + kind_str + "' model, expected '" +
                       std::string(kind_name(*expected_kind)) + "'");
    NetDims dims{doc.at("dims").at("gru_hidden").get<int>(),
                 doc.at("dims").at("mlp_hidden").get<int>()};
    if (doc.at("dims").at("inputs").get<std::size_t>() != kFactorCount)
      throw ShapeError("checkpoint input width does not match the four factors");
    if (kind == GoalWeightModel::Kind::kProi && (dims.gru_hidden < 1 || dims.mlp_hidden < 1))
      throw ShapeError("checkpoint dims must be positive");
    FactorMask disabled{};
    for (const auto& f : doc.at("disabled_factors"))
      disabled[static_cast<std::size_t>(factor_from_name(f.get<std::string>()))] = true;

    Checkpoint ckpt{GoalWeightModel::empty(kind, dims, disabled),
                    doc.at("step_count").get<std::uint64_t>()};
    const auto& layers = doc.at("layers");
    if (layers.size() != ckpt.model.layers().size())
      throw ShapeError("checkpoint has " + std::to_string(layers.size()) + " layers, expected " +
                       std::to_string(ckpt.model.layers().size()));
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& info = ckpt.model.layers()[i];
      const auto& l = layers[i];
      if (l.at("name").get<std::string>() != info.name)
        throw ShapeError("layer " + std::to_string(i) + " should be '" + info.name + "'");
      const auto shape = l.at("shape").get<std::vector<std::size_t>>();
      const auto values = l.at("values").get<std::vector<double>>();
      if (shape.size() != 2 || shape[0] != info.rows || shape[1] != info.cols ||
          values.size() != info.size())
        throw ShapeError("layer '" + info.name + "' does not match the declared dims");
      std::copy(values.begin(), values.end(), ckpt.model.layer_values(info.name).begin());
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  write_checkpoint(ckpt, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<GoalWeightModel::Kind> expected_kind) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read checkpoint " + path.string());
  return read_checkpoint(in, expected_kind);
}

}  // namespace proactive
