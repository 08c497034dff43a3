#pragma once

#include "fsgnn/harness.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace fsgnn {

enum class PresetTable { three_hop, eight_hop };

struct Preset {
  std::string_view dataset;
  double wd_sca, lr_sca, wd_fc1, wd_fc2, lr_fc, dropout;
};

/// Lower-cases and maps aliases ("film" -> "actor").
std::string canonical_dataset_name(std::string_view name);

PresetTable preset_table_from_string(const std::string& s);

/// Best published setting for `dataset`, or nullopt when unknown.
std::optional<Preset> find_preset(PresetTable table, std::string_view dataset);

/// Copies the six searched hyperparameters into `cfg`.
void apply_preset(const Preset& p, TrainConfig& cfg);

} // namespace fsgnn
