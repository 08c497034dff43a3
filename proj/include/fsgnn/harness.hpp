#pragma once

#include "fsgnn/dataset.hpp"
#include "fsgnn/hop_features.hpp"
#include "fsgnn/model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsgnn {

/// Which propagated branches feed the model besides X.
enum class FeatureMode { all, homo, hetero };

std::string to_string(FeatureMode m);
FeatureMode feature_mode_from_string(const std::string& s);
HopMode hop_mode_for(FeatureMode m);

struct TrainConfig {
  double lr_fc = 0.01;
  double lr_sca = 0.01;
  double wd_fc1 = 0.0;
  double wd_fc2 = 0.0;
  double wd_sca = 0.0;
  double dropout = 0.5;
  Index hidden = 64;
  int hops = 3;
  FeatureMode mode = FeatureMode::all;
  ModelVariant variant;
  int max_epochs = 1000;
  int patience = 100;
  std::uint64_t seed = 0;

  /// Throws InputError describing the first invalid field.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct TrainResult {
  std::vector<double> train_loss;
  std::vector<double> val_acc;
  std::vector<double> val_loss;
  int best_epoch = 0;
  int epochs_run = 0;
  double best_val_acc = 0;
  double best_val_loss = 0;
  double test_acc = 0;
  VectorXr alphas;
  std::vector<std::string> branch_names;
  double wall_seconds = 0;
  ModelParams best_params;
};

/// A trial that aborted (e.g. NaN loss); `what()` echoes context.
class TrialError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Row-normalizes X once, then precomputes hop features with both
/// symmetrically normalized operators.
HopFeatures build_features(const DatasetBundle& bundle, int hops, HopMode mode);

/// Full-batch training with Adam parameter groups and early stopping on
/// validation accuracy (ties: lower validation loss). Test accuracy is
/// computed once, on the restored best parameters.
/// Called after every optimizer step with the epoch number and current parameters.
using EpochObserver = std::function<void(int epoch, const ModelParams& params)>;

TrainResult train(const TrainConfig& cfg, const DatasetBundle& bundle, const HopFeatures& fs,
                  const SplitSpec& split, const EpochObserver& observer = {});

/// Fraction of `idx` whose predicted class matches `labels`.
double evaluate(const ModelParams& p, const HopFeatures& fs, std::span<const int> labels,
                std::span<const Index> idx);

struct SplitsSummary {
  std::vector<TrainResult> results;
  double mean_test = 0;
  double std_test = 0; ///< population standard deviation
  double mean_val = 0;
};

/// Trains split i with seed derive_seed(cfg.seed, i); up to `jobs` trials run
/// concurrently, results are ordered by split index.
SplitsSummary run_splits(const TrainConfig& cfg, const DatasetBundle& bundle, const HopFeatures& fs,
                         std::span<const SplitSpec> splits, int jobs = 1);

struct GridSpace {
  std::vector<double> wd_sca{0.0};
  std::vector<double> lr_sca{0.01};
  std::vector<double> wd_fc1{0.0};
  std::vector<double> wd_fc2{0.0};
  std::vector<double> lr_fc{0.01};
  std::vector<double> dropout{0.5};

  /// The full FSGNN search space (1080 points).
  static GridSpace fsgnn_full();
  /// Learning rate, weight decays and dropout only (54 points).
  static GridSpace mlp_study();
  /// The single point of `cfg`.
  static GridSpace point(const TrainConfig& cfg);

  std::size_t size() const;
  /// Config `index` in row-major order over (wd_sca, lr_sca, wd_fc1, wd_fc2,
  /// lr_fc, dropout), other fields from `base`.
  TrainConfig at(std::size_t index, const TrainConfig& base) const;
};

nlohmann::json to_json(const GridSpace& g);

struct GridEntry {
  std::size_t index = 0;
  TrainConfig cfg;
  SplitsSummary summary;
};

struct GridReport {
  std::vector<GridEntry> entries; ///< by config index
  std::vector<std::size_t> ranking; ///< entry positions, best mean val first
  const GridEntry& best() const { return entries.at(ranking.at(0)); }
};

/// Scores every config by mean validation accuracy; ties go to the lower index.
GridReport grid_search(const GridSpace& space, const TrainConfig& base, const DatasetBundle& bundle,
                       const HopFeatures& fs, std::span<const SplitSpec> splits, int jobs = 1);

enum class FeatureSetting { single, all, sub };
std::string to_string(FeatureSetting s);
FeatureSetting feature_setting_from_string(const std::string& s);

struct StudyRow {
  std::string label; ///< branch names joined by '+'
  FeatureMask mask;
  nn::Aggregation aggregation = nn::Aggregation::concat;
  GridEntry chosen;  ///< best grid point for this row, selected on validation
};

struct StudyTable {
  FeatureSetting setting = FeatureSetting::single;
  std::vector<StudyRow> rows;
  std::size_t best_row = 0; ///< highest mean validation accuracy
};

/// Single / all / sub feature studies with soft-selection disabled. `fs` is
/// the full feature set; masks index its canonical order.
StudyTable feature_setting_study(const DatasetBundle& bundle, const HopFeatures& fs,
                                 std::span<const SplitSpec> splits, FeatureSetting setting,
                                 std::span<const nn::Aggregation> aggregations, const TrainConfig& base,
                                 const GridSpace& space, int jobs = 1);

struct AblationRow {
  std::string variant;
  ModelVariant flags;
  double mean_test = 0; ///< mean over configs of per-config mean over splits
  double std_test = 0;  ///< population std over configs
  std::vector<double> per_config;
};

/// Proposed, without soft-selection, common W0, without L2 normalization.
std::vector<AblationRow> ablation_run(const DatasetBundle& bundle, const HopFeatures& fs,
                                      std::span<const SplitSpec> splits, const GridSpace& space,
                                      const TrainConfig& base, int jobs = 1);

struct SweepPoint {
  int hops = 0;
  std::size_t branches = 0;
  double mean_test = 0;
  double std_test = 0;
};

/// Accuracy versus hop count; features for each hop count are built and
/// released in turn.
std::vector<SweepPoint> hop_sweep(const DatasetBundle& bundle, std::span<const SplitSpec> splits,
                                  std::span<const int> hops,
                                  const std::function<TrainConfig(int)>& config_for, int jobs = 1);

struct AlphaReport {
  std::vector<std::string> branch_names;
  std::vector<std::string> row_names;
  std::vector<VectorXr> rows;

  std::string to_csv() const;
};

struct AlphaGroup {
  std::string name;
  std::vector<const TrainResult*> results;
};

/// Mean learned alpha per branch for each group, canonical branch order.
AlphaReport export_alpha_report(std::span<const AlphaGroup> groups);

/// Per-split result without parameters or timing.
nlohmann::json to_json(const TrainResult& r, bool include_curves = true);
nlohmann::json to_json(const SplitsSummary& s, bool include_curves = true);

std::string splits_csv(const SplitsSummary& s);
std::string grid_csv(const GridReport& g);
std::string study_csv(const StudyTable& t);
std::string ablation_csv(std::span<const AblationRow> rows);
std::string sweep_csv(std::span<const SweepPoint> points);

} // namespace fsgnn
