#include "fsgnn/harness.hpp"

#include "fsgnn/adam.hpp"
#include "fsgnn/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace fsgnn {

std::string to_string(FeatureMode m) {
  switch (m) {
  case FeatureMode::all: return "all";
  case FeatureMode::homo: return "homo";
  case FeatureMode::hetero: return "hetero";
  }
  return "all";
}

FeatureMode feature_mode_from_string(const std::string& s) {
  if (s == "all") return FeatureMode::all;
  if (s == "homo") return FeatureMode::homo;
  if (s == "hetero") return FeatureMode::hetero;
  throw InputError("unknown feature mode '" + s + "' (expected all|homo|hetero)");
}

HopMode hop_mode_for(FeatureMode m) {
  switch (m) {
  case FeatureMode::homo: return HopMode::self_loop_only;
  case FeatureMode::hetero: return HopMode::no_loop_only;
  case FeatureMode::all: break;
  }
  return HopMode::both;
}

void TrainConfig::validate() const {
  auto bad = [](const std::string& msg) { throw InputError("config: " + msg); };
  if (!(lr_fc > 0) || !std::isfinite(lr_fc)) bad("lr_fc must be > 0");
  if (!(lr_sca > 0) || !std::isfinite(lr_sca)) bad("lr_sca must be > 0");
  for (double wd : {wd_fc1, wd_fc2, wd_sca})
    if (!(wd >= 0) || !std::isfinite(wd)) bad("weight decay must be >= 0");
  if (!(dropout >= 0 && dropout < 1)) bad("dropout must be in [0, 1)");
  if (hidden < 1) bad("hidden must be >= 1");
  if (hops < 1) bad("hops must be >= 1");
  if (max_epochs < 1) bad("max_epochs must be >= 1");
  if (patience < 1) bad("patience must be >= 1");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {
      {"lr_fc", c.lr_fc},
      {"lr_sca", c.lr_sca},
      {"wd_fc1", c.wd_fc1},
      {"wd_fc2", c.wd_fc2},
      {"wd_sca", c.wd_sca},
      {"dropout", c.dropout},
      {"hidden", c.hidden},
      {"hops", c.hops},
      {"mode", to_string(c.mode)},
      {"aggregation", to_string(c.variant.aggregation)},
      {"soft_selection", c.variant.soft_selection},
      {"shared_w0", c.variant.shared_w0},
      {"l2_norm", c.variant.l2_norm},
      {"hidden_relu", c.variant.hidden_relu},
      {"max_epochs", c.max_epochs},
      {"patience", c.patience},
      {"seed", c.seed},
  };
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  try {
    TrainConfig c;
    c.lr_fc = j.at("lr_fc").get<double>();
    c.lr_sca = j.at("lr_sca").get<double>();
    c.wd_fc1 = j.at("wd_fc1").get<double>();
    c.wd_fc2 = j.at("wd_fc2").get<double>();
    c.wd_sca = j.at("wd_sca").get<double>();
    c.dropout = j.at("dropout").get<double>();
    c.hidden = j.at("hidden").get<Index>();
    c.hops = j.at("hops").get<int>();
    c.mode = feature_mode_from_string(j.at("mode").get<std::string>());
    c.variant.aggregation = aggregation_from_string(j.at("aggregation").get<std::string>());
    c.variant.soft_selection = j.at("soft_selection").get<bool>();
    c.variant.shared_w0 = j.at("shared_w0").get<bool>();
    c.variant.l2_norm = j.at("l2_norm").get<bool>();
    c.variant.hidden_relu = j.at("hidden_relu").get<bool>();
    c.max_epochs = j.at("max_epochs").get<int>();
    c.patience = j.at("patience").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config JSON: ") + e.what());
  }
}

HopFeatures build_features(const DatasetBundle& bundle, int hops, HopMode mode) {
  const MatrixXr x = row_normalize(bundle.features);
  const auto a = sym_normalize<double>(bundle.graph, LoopMode::none);
  const auto a_tilde = sym_normalize<double>(bundle.graph, LoopMode::self_loop);
  return generate(x, a, a_tilde, hops, mode);
}

double evaluate(const ModelParams& p, const HopFeatures& fs, std::span<const int> labels,
                std::span<const Index> idx) {
  if (idx.empty()) throw InputError("evaluate: empty index set");
  RngStream unused(0);
  const MatrixXr logits = forward(p, fs, ForwardOptions{}, unused, idx);
  const auto pred = predict(logits);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (pred[i] == labels[static_cast<std::size_t>(idx[i])]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(idx.size());
}

namespace {

struct EvalPoint {
  double acc = 0;
  double loss = 0;
};

EvalPoint eval_with_loss(const ModelParams& p, const HopFeatures& fs, std::span<const int> labels,
                         std::span<const Index> idx) {
  RngStream unused(0);
  const MatrixXr logits = forward(p, fs, ForwardOptions{}, unused, idx);
  std::vector<int> local(idx.size());
  std::vector<Index> rows(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    local[i] = labels[static_cast<std::size_t>(idx[i])];
    rows[i] = static_cast<Index>(i);
  }
  const auto xent = nn::softmax_xent_forward<double>(logits, local, rows);
  const auto pred = predict(logits);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (pred[i] == local[i]) ++correct;
  return {static_cast<double>(correct) / static_cast<double>(idx.size()), xent.loss};
}

std::string config_echo(const TrainConfig& cfg) { return to_json(cfg).dump(); }

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double pop_std(std::span<const double> v) {
  if (v.empty()) return 0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

/// Runs body(i) for i in [0, n) on at most `jobs` threads; rethrows the
/// failure with the lowest index.
template <typename Body>
void parallel_for(std::size_t n, int jobs, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  auto loop = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

} // namespace

TrainResult train(const TrainConfig& cfg, const DatasetBundle& bundle, const HopFeatures& fs,
                  const SplitSpec& split, const EpochObserver& observer) {
  cfg.validate();
  split.validate(bundle.num_nodes());
  require_shape(fs.rows() == bundle.num_nodes(), "train: feature rows != node count");
  const auto start = std::chrono::steady_clock::now();
  const auto labels = bundle.labels();

  ModelParams params = init_params(fs, cfg.hidden, bundle.num_classes(), cfg.variant,
                                   derive_seed(cfg.seed, 1));
  RngStream dropout_rng(derive_seed(cfg.seed, 2));

  std::vector<MatrixXr*> tensors;
  std::vector<nn::AdamHyper> hyper;
  std::vector<std::string> names;
  params.for_each_tensor([&](const std::string& name, ParamGroup g, MatrixXr& t) {
    if (g == ParamGroup::sca && !cfg.variant.soft_selection) return;
    nn::AdamHyper h;
    switch (g) {
    case ParamGroup::fc1: h.lr = cfg.lr_fc; h.weight_decay = cfg.wd_fc1; break;
    case ParamGroup::fc2: h.lr = cfg.lr_fc; h.weight_decay = cfg.wd_fc2; break;
    case ParamGroup::sca: h.lr = cfg.lr_sca; h.weight_decay = cfg.wd_sca; break;
    }
    tensors.push_back(&t);
    hyper.push_back(h);
    names.push_back(name);
  });
  nn::AdamState<double> state;

  TrainResult r;
  r.best_params = params;
  r.best_val_acc = -1;
  r.best_val_loss = 0;
  int since_best = 0;
  const ForwardOptions train_opts{true, cfg.dropout};

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    LossAndGrads lg;
    try {
      lg = loss_and_grads(params, fs, labels, split.train, train_opts, dropout_rng);
    } catch (const NumericError& e) {
      throw TrialError("epoch " + std::to_string(epoch) + ": " + e.what() +
                       "; config " + config_echo(cfg));
    }
    std::vector<const MatrixXr*> grads;
    lg.grads.for_each_tensor([&](const std::string& name, ParamGroup, const MatrixXr& t) {
      if (std::find(names.begin(), names.end(), name) != names.end()) grads.push_back(&t);
    });
    nn::adam_step<double>(tensors, grads, state, hyper);
    if (observer) observer(epoch, params);

    EvalPoint v;
    try {
      v = eval_with_loss(params, fs, labels, split.val);
    } catch (const NumericError& e) {
      throw TrialError("epoch " + std::to_string(epoch) + ": " + e.what() +
                       "; config " + config_echo(cfg));
    }
    if (!std::isfinite(v.loss))
      throw TrialError("epoch " + std::to_string(epoch) +
                       ": non-finite validation loss; config " + config_echo(cfg));
    r.train_loss.push_back(lg.loss);
    r.val_acc.push_back(v.acc);
    r.val_loss.push_back(v.loss);
    r.epochs_run = epoch;

    const bool improved =
        v.acc > r.best_val_acc || (v.acc == r.best_val_acc && v.loss < r.best_val_loss);
    if (improved) {
      r.best_val_acc = v.acc;
      r.best_val_loss = v.loss;
      r.best_epoch = epoch;
      r.best_params = params;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }

  r.test_acc = evaluate(r.best_params, fs, labels, split.test);
  r.alphas = get_alphas(r.best_params);
  for (const auto& t : fs.tags()) r.branch_names.push_back(t.name());
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

SplitsSummary run_splits(const TrainConfig& cfg, const DatasetBundle& bundle, const HopFeatures& fs,
                         std::span<const SplitSpec> splits, int jobs) {
  if (splits.empty()) throw InputError("run_splits: no splits");
  SplitsSummary s;
  s.results.resize(splits.size());
  parallel_for(splits.size(), jobs, [&](std::size_t i) {
    TrainConfig c = cfg;
    c.seed = derive_seed(cfg.seed, i);
    try {
      s.results[i] = train(c, bundle, fs, splits[i]);
    } catch (const std::exception& e) {
      throw TrialError("split " + std::to_string(i) + ": " + e.what());
    }
  });
  std::vector<double> test, val;
  for (const auto& r : s.results) {
    test.push_back(r.test_acc);
    val.push_back(r.best_val_acc);
  }
  s.mean_test = mean_of(test);
  s.std_test = pop_std(test);
  s.mean_val = mean_of(val);
  return s;
}

GridSpace GridSpace::fsgnn_full() {
  GridSpace g;
  g.wd_sca = {0.0, 1e-4, 1e-3, 1e-2, 0.1};
  g.lr_sca = {0.04, 0.02, 0.01, 0.005};
  g.wd_fc1 = {0.0, 1e-4, 1e-3};
  g.wd_fc2 = {0.0, 1e-4, 1e-3};
  g.lr_fc = {0.01, 0.005};
  g.dropout = {0.5, 0.6, 0.7};
  return g;
}

GridSpace GridSpace::mlp_study() {
  GridSpace g = fsgnn_full();
  g.wd_sca = {0.0};
  g.lr_sca = {0.01};
  return g;
}

GridSpace GridSpace::point(const TrainConfig& c) {
  GridSpace g;
  g.wd_sca = {c.wd_sca};
  g.lr_sca = {c.lr_sca};
  g.wd_fc1 = {c.wd_fc1};
  g.wd_fc2 = {c.wd_fc2};
  g.lr_fc = {c.lr_fc};
  g.dropout = {c.dropout};
  return g;
}

std::size_t GridSpace::size() const {
  return wd_sca.size() * lr_sca.size() * wd_fc1.size() * wd_fc2.size() * lr_fc.size() *
         dropout.size();
}

TrainConfig GridSpace::at(std::size_t index, const TrainConfig& base) const {
  if (index >= size()) throw InputError("grid index out of range");
  TrainConfig c = base;
  auto take = [&index](const std::vector<double>& axis) {
    const double v = axis[index % axis.size()];
    index /= axis.size();
    return v;
  };
  c.dropout = take(dropout);
  c.lr_fc = take(lr_fc);
  c.wd_fc2 = take(wd_fc2);
  c.wd_fc1 = take(wd_fc1);
  c.lr_sca = take(lr_sca);
  c.wd_sca = take(wd_sca);
  return c;
}

nlohmann::json to_json(const GridSpace& g) {
  return {{"wd_sca", g.wd_sca}, {"lr_sca", g.lr_sca}, {"wd_fc1", g.wd_fc1},
          {"wd_fc2", g.wd_fc2}, {"lr_fc", g.lr_fc},   {"dropout", g.dropout}};
}

GridReport grid_search(const GridSpace& space, const TrainConfig& base, const DatasetBundle& bundle,
                       const HopFeatures& fs, std::span<const SplitSpec> splits, int jobs) {
  if (space.size() == 0) throw InputError("grid_search: empty axis");
  GridReport rep;
  rep.entries.resize(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    rep.entries[i].index = i;
    rep.entries[i].cfg = space.at(i, base);
    rep.entries[i].cfg.validate();
  }
  parallel_for(space.size(), jobs, [&](std::size_t i) {
    try {
      rep.entries[i].summary = run_splits(rep.entries[i].cfg, bundle, fs, splits, 1);
    } catch (const std::exception& e) {
      throw TrialError("config " + std::to_string(i) + ": " + e.what());
    }
  });
  rep.ranking.resize(space.size());
  std::iota(rep.ranking.begin(), rep.ranking.end(), std::size_t{0});
  std::stable_sort(rep.ranking.begin(), rep.ranking.end(), [&](std::size_t a, std::size_t b) {
    return rep.entries[a].summary.mean_val > rep.entries[b].summary.mean_val;
  });
  return rep;
}

std::string to_string(FeatureSetting s) {
  switch (s) {
  case FeatureSetting::single: return "single";
  case FeatureSetting::all: return "all";
  case FeatureSetting::sub: return "sub";
  }
  return "single";
}

FeatureSetting feature_setting_from_string(const std::string& s) {
  if (s == "single") return FeatureSetting::single;
  if (s == "all") return FeatureSetting::all;
  if (s == "sub") return FeatureSetting::sub;
  throw InputError("unknown feature setting '" + s + "' (expected single|all|sub)");
}

StudyTable feature_setting_study(const DatasetBundle& bundle, const HopFeatures& fs,
                                 std::span<const SplitSpec> splits, FeatureSetting setting,
                                 std::span<const nn::Aggregation> aggregations, const TrainConfig& base,
                                 const GridSpace& space, int jobs) {
  if (aggregations.empty()) throw InputError("study: no aggregation given");
  const std::size_t L = fs.size();
  std::vector<FeatureMask> masks;
  std::vector<nn::Aggregation> aggs;
  switch (setting) {
  case FeatureSetting::single:
    for (std::size_t i = 0; i < L; ++i) masks.push_back(FeatureMask::single(L, i));
    aggs = {aggregations.front()};
    break;
  case FeatureSetting::all:
    masks.push_back(FeatureMask::all(L));
    aggs.assign(aggregations.begin(), aggregations.end());
    break;
  case FeatureSetting::sub:
    masks = enumerate_sub_masks(L);
    if (masks.empty()) throw InputError("study: sub setting needs at least 3 branches");
    aggs.assign(aggregations.begin(), aggregations.end());
    break;
  }

  StudyTable table;
  table.setting = setting;
  TrainConfig cfg = base;
  cfg.variant.soft_selection = false;
  for (const auto& mask : masks) {
    const HopFeatures sub = select(fs, mask);
    std::string label;
    for (const auto& t : sub.tags()) label += (label.empty() ? "" : "+") + t.name();
    for (auto agg : aggs) {
      cfg.variant.aggregation = agg;
      StudyRow row;
      row.label = label;
      row.mask = mask;
      row.aggregation = agg;
      GridReport rep = grid_search(space, cfg, bundle, sub, splits, jobs);
      row.chosen = rep.best();
      table.rows.push_back(std::move(row));
    }
  }
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    if (table.rows[i].chosen.summary.mean_val > table.rows[table.best_row].chosen.summary.mean_val)
      table.best_row = i;
  return table;
}

std::vector<AblationRow> ablation_run(const DatasetBundle& bundle, const HopFeatures& fs,
                                      std::span<const SplitSpec> splits, const GridSpace& space,
                                      const TrainConfig& base, int jobs) {
  std::vector<AblationRow> rows(4);
  rows[0].variant = "proposed";
  rows[0].flags = base.variant;
  rows[1].variant = "without_soft_selection";
  rows[1].flags = base.variant;
  rows[1].flags.soft_selection = false;
  rows[2].variant = "common_w0";
  rows[2].flags = base.variant;
  rows[2].flags.shared_w0 = true;
  rows[3].variant = "without_l2_norm";
  rows[3].flags = base.variant;
  rows[3].flags.l2_norm = false;
  for (auto& row : rows) {
    TrainConfig cfg = base;
    cfg.variant = row.flags;
    const GridReport rep = grid_search(space, cfg, bundle, fs, splits, jobs);
    for (const auto& e : rep.entries) row.per_config.push_back(e.summary.mean_test);
    row.mean_test = mean_of(row.per_config);
    row.std_test = pop_std(row.per_config);
  }
  return rows;
}

std::vector<SweepPoint> hop_sweep(const DatasetBundle& bundle, std::span<const SplitSpec> splits,
                                  std::span<const int> hops,
                                  const std::function<TrainConfig(int)>& config_for, int jobs) {
  std::vector<SweepPoint> out;
  for (int k : hops) {
    const TrainConfig cfg = config_for(k);
    const HopFeatures fs = build_features(bundle, k, hop_mode_for(cfg.mode));
    TrainConfig c = cfg;
    c.hops = k;
    const SplitsSummary s = run_splits(c, bundle, fs, splits, jobs);
    out.push_back({k, fs.size(), s.mean_test, s.std_test});
  }
  return out;
}

std::string AlphaReport::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17) << "group";
  for (const auto& b : branch_names) os << ',' << b;
  os << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    os << row_names[r];
    for (Index c = 0; c < rows[r].size(); ++c) os << ',' << rows[r](c);
    os << '\n';
  }
  return os.str();
}

AlphaReport export_alpha_report(std::span<const AlphaGroup> groups) {
  AlphaReport rep;
  for (const auto& g : groups) {
    if (g.results.empty()) throw InputError("alpha report: group '" + g.name + "' has no results");
    const auto& names = g.results.front()->branch_names;
    if (rep.branch_names.empty()) rep.branch_names = names;
    if (names != rep.branch_names)
      throw InputError("alpha report: group '" + g.name + "' has a different branch layout");
    VectorXr sum = VectorXr::Zero(static_cast<Index>(names.size()));
    for (const TrainResult* r : g.results) {
      if (r->branch_names != names || r->alphas.size() != sum.size())
        throw InputError("alpha report: inconsistent results in group '" + g.name + "'");
      sum += r->alphas;
    }
    rep.row_names.push_back(g.name);
    rep.rows.push_back(sum / static_cast<double>(g.results.size()));
  }
  return rep;
}

nlohmann::json to_json(const TrainResult& r, bool include_curves) {
  nlohmann::json j = {
      {"best_epoch", r.best_epoch},
      {"epochs_run", r.epochs_run},
      {"best_val_acc", r.best_val_acc},
      {"best_val_loss", r.best_val_loss},
      {"test_acc", r.test_acc},
      {"branches", r.branch_names},
      {"alphas", std::vector<double>(r.alphas.data(), r.alphas.data() + r.alphas.size())},
  };
  if (include_curves) {
    j["train_loss"] = r.train_loss;
    j["val_acc"] = r.val_acc;
    j["val_loss"] = r.val_loss;
  }
  return j;
}

nlohmann::json to_json(const SplitsSummary& s, bool include_curves) {
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t i = 0; i < s.results.size(); ++i) {
    auto j = to_json(s.results[i], include_curves);
    j["split"] = i;
    per.push_back(std::move(j));
  }
  return {{"mean_test_acc", s.mean_test},
          {"std_test_acc", s.std_test},
          {"mean_val_acc", s.mean_val},
          {"splits", std::move(per)}};
}

namespace {
std::ostringstream csv_stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}
} // namespace

std::string splits_csv(const SplitsSummary& s) {
  auto os = csv_stream();
  os << "split,best_epoch,epochs_run,best_val_acc,test_acc\n";
  for (std::size_t i = 0; i < s.results.size(); ++i) {
    const auto& r = s.results[i];
    os << i << ',' << r.best_epoch << ',' << r.epochs_run << ',' << r.best_val_acc << ','
       << r.test_acc << '\n';
  }
  return os.str();
}

std::string grid_csv(const GridReport& g) {
  auto os = csv_stream();
  os << "rank,index,wd_sca,lr_sca,wd_fc1,wd_fc2,lr_fc,dropout,mean_val_acc,mean_test_acc,std_test_acc\n";
  for (std::size_t rank = 0; rank < g.ranking.size(); ++rank) {
    const auto& e = g.entries[g.ranking[rank]];
    const auto& c = e.cfg;
    os << rank + 1 << ',' << e.index << ',' << c.wd_sca << ',' << c.lr_sca << ',' << c.wd_fc1 << ','
       << c.wd_fc2 << ',' << c.lr_fc << ',' << c.dropout << ',' << e.summary.mean_val << ','
       << e.summary.mean_test << ',' << e.summary.std_test << '\n';
  }
  return os.str();
}

std::string study_csv(const StudyTable& t) {
  auto os = csv_stream();
  os << "setting,features,mask,aggregation,config_index,mean_val_acc,mean_test_acc,std_test_acc,best\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    os << to_string(t.setting) << ',' << r.label << ',' << r.mask.to_string() << ','
       << to_string(r.aggregation) << ',' << r.chosen.index << ',' << r.chosen.summary.mean_val << ','
       << r.chosen.summary.mean_test << ',' << r.chosen.summary.std_test << ','
       << (i == t.best_row ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string ablation_csv(std::span<const AblationRow> rows) {
  auto os = csv_stream();
  os << "variant,configs,mean_test_acc,std_test_acc\n";
  for (const auto& r : rows)
    os << r.variant << ',' << r.per_config.size() << ',' << r.mean_test << ',' << r.std_test << '\n';
  return os.str();
}

std::string sweep_csv(std::span<const SweepPoint> points) {
  auto os = csv_stream();
  os << "hops,branches,mean_test_acc,std_test_acc\n";
  for (const auto& p : points)
    os << p.hops << ',' << p.branches << ',' << p.mean_test << ',' << p.std_test << '\n';
  return os.str();
}

} // namespace fsgnn
