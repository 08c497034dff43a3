#include "fsgnn/presets.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace fsgnn {
namespace {

// dataset, wd_sca, lr_sca, wd_fc1, wd_fc2, lr_fc, dropout
constexpr std::array<Preset, 9> kThreeHop{{
    {"cora", 0.1, 0.01, 0.001, 0.0001, 0.01, 0.6},
    {"citeseer", 0.0001, 0.005, 0.001, 0.0, 0.01, 0.5},
    {"pubmed", 0.01, 0.005, 0.0001, 0.0001, 0.01, 0.7},
    {"chameleon", 0.1, 0.005, 0.0, 0.0, 0.005, 0.5},
    {"wisconsin", 0.0001, 0.01, 0.001, 0.0001, 0.01, 0.5},
    {"texas", 0.001, 0.01, 0.001, 0.0, 0.01, 0.7},
    {"cornell", 0.0, 0.01, 0.001, 0.001, 0.01, 0.5},
    {"squirrel", 0.1, 0.04, 0.0, 0.001, 0.01, 0.7},
    {"actor", 0.0, 0.04, 0.001, 0.0001, 0.01, 0.7},
}};

constexpr std::array<Preset, 9> kEightHop{{
    {"cora", 0.1, 0.02, 0.001, 0.0001, 0.01, 0.6},
    {"citeseer", 0.0001, 0.01, 0.001, 0.0001, 0.01, 0.5},
    {"pubmed", 0.01, 0.02, 0.0001, 0.0, 0.005, 0.7},
    {"chameleon", 0.1, 0.01, 0.0, 0.0, 0.005, 0.5},
    {"wisconsin", 0.001, 0.02, 0.001, 0.0001, 0.01, 0.5},
    {"texas", 0.01, 0.01, 0.001, 0.0, 0.01, 0.7},
    {"cornell", 0.0, 0.01, 0.001, 0.0001, 0.01, 0.5},
    {"squirrel", 0.1, 0.02, 0.0, 0.0001, 0.01, 0.5},
    {"actor", 0.0001, 0.04, 0.001, 0.0001, 0.01, 0.7},
}};

} // namespace

std::string canonical_dataset_name(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "film") s = "actor";
  return s;
}

PresetTable preset_table_from_string(const std::string& s) {
  if (s == "3hop") return PresetTable::three_hop;
  if (s == "8hop") return PresetTable::eight_hop;
  throw InputError("unknown preset '" + s + "' (expected 3hop|8hop)");
}

std::optional<Preset> find_preset(PresetTable table, std::string_view dataset) {
  const std::string key = canonical_dataset_name(dataset);
  const auto& rows = table == PresetTable::three_hop ? kThreeHop : kEightHop;
  for (const auto& p : rows)
    if (p.dataset == key) return p;
  return std::nullopt;
}

void apply_preset(const Preset& p, TrainConfig& cfg) {
  cfg.wd_sca = p.wd_sca;
  cfg.lr_sca = p.lr_sca;
  cfg.wd_fc1 = p.wd_fc1;
  cfg.wd_fc2 = p.wd_fc2;
  cfg.lr_fc = p.lr_fc;
  cfg.dropout = p.dropout;
}

} // namespace fsgnn
