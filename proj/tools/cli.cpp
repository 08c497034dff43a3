#include "cli.hpp"

#include "fsgnn/dataset.hpp"
#include "fsgnn/harness.hpp"
#include "fsgnn/hop_features.hpp"
#include "fsgnn/model.hpp"
#include "fsgnn/presets.hpp"
#include "fsgnn/synthetic.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace fsgnn::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Options {
  // data
  std::string data_dir;
  std::string dataset;
  std::string data_root;
  std::string name;
  std::string encoding = "dense";
  Index width = 0;
  // splits
  std::vector<std::string> split_files;
  int n_splits = 10;
  std::uint64_t split_seed = 0;
  std::vector<double> fractions{0.6, 0.2, 0.2};
  int split_index = 0;
  // output
  std::string out = "results";
  std::string tag;
  std::string cache_dir;
  int jobs = 1;
  // model and training
  int hops = 3;
  std::string mode = "all";
  std::string agg = "cat";
  bool no_soft = false;
  bool shared_w0 = false;
  bool no_l2 = false;
  bool no_relu = false;
  std::optional<double> lr_fc, lr_sca, wd_fc1, wd_fc2, wd_sca, dropout;
  std::string preset;
  Index hidden = 64;
  int max_epochs = 1000;
  int patience = 100;
  std::uint64_t seed = 0;
  bool save_params = false;
  // searches
  std::string grid;
  std::string grid_json;
  std::string grid_inline;
  std::string setting = "single";
  std::string aggs = "cat,sum";
  std::string hops_list = "3,8,16,32";
  // alphas / replay
  std::vector<std::string> inputs;
  std::string replay_file;
  // synth
  std::string kind = "csbm";
  Index nodes = 200;
  int classes = 4;
  Index dims = 32;
  double homophily = 0.8;
  double avg_degree = 6.0;
  Index pairs_per_class = 20;
};

struct Context {
  std::string command;
  Options o;
  fs::path dir;
  std::string name;
  DatasetBundle bundle;
  std::vector<SplitSpec> splits;
  std::vector<std::string> data_argv;
  std::vector<std::string> split_argv;
};

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  f << text;
  if (!f) throw InputError("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

FeatureEncoding encoding_from_string(const std::string& s) {
  if (s == "dense") return FeatureEncoding::dense;
  if (s == "index_list") return FeatureEncoding::index_list;
  throw InputError("unknown feature encoding '" + s + "' (expected dense|index_list)");
}

fs::path resolve_dir(const Options& o, std::string& name) {
  fs::path dir;
  if (!o.data_dir.empty()) {
    dir = o.data_dir;
  } else if (!o.dataset.empty()) {
    std::string root = o.data_root;
    if (root.empty())
      if (const char* env = std::getenv("FSGNN_DATA_ROOT")) root = env;
    if (root.empty())
      throw InputError("--dataset needs --data-root or FSGNN_DATA_ROOT");
    dir = fs::path(root) / o.dataset;
  } else {
    throw InputError("one of --data-dir or --dataset is required");
  }
  if (!fs::is_directory(dir)) throw InputError("dataset directory not found: " + dir.string());
  dir = fs::absolute(dir).lexically_normal();
  name = !o.name.empty() ? o.name : !o.dataset.empty() ? o.dataset : dir.filename().string();
  if (name.empty()) name = dir.parent_path().filename().string();
  return dir;
}

void load_data(Context& c) {
  c.dir = resolve_dir(c.o, c.name);
  const FeatureEncoding enc = encoding_from_string(c.o.encoding);
  c.bundle = load_dataset(c.dir, c.name, enc, c.o.width);
  c.data_argv = {"--data-dir", c.dir.string(), "--name", c.name, "--feature-encoding", c.o.encoding,
                 "--feature-width", std::to_string(c.o.width)};
}

void load_splits(Context& c) {
  const Options& o = c.o;
  const Index n = c.bundle.num_nodes();
  std::vector<fs::path> files(o.split_files.begin(), o.split_files.end());
  if (files.empty()) {
    for (int i = 0; i < o.n_splits; ++i) {
      const fs::path p = c.dir / "splits" / ("split_" + std::to_string(i) + ".txt");
      if (!fs::exists(p)) break;
      files.push_back(p);
    }
  }
  if (!files.empty()) {
    for (const auto& p : files) {
      c.splits.push_back(parse_split_file(p, n));
      c.split_argv.push_back("--split-file");
      c.split_argv.push_back(fs::absolute(p).lexically_normal().string());
    }
    return;
  }
  if (o.n_splits < 1) throw InputError("--n must be >= 1");
  if (o.fractions.size() != 3) throw InputError("--split-fractions needs three values");
  const std::array<double, 3> fr{o.fractions[0], o.fractions[1], o.fractions[2]};
  for (int i = 0; i < o.n_splits; ++i)
    c.splits.push_back(make_random_split(c.bundle.labels(), c.bundle.num_classes(), fr,
                                         derive_seed(o.split_seed, static_cast<std::uint64_t>(i))));
  c.split_argv = {"--n", std::to_string(o.n_splits), "--split-seed", std::to_string(o.split_seed),
                  "--split-fractions", fmt(fr[0]), fmt(fr[1]), fmt(fr[2])};
}

/// Defaults, then the preset, then explicit flags.
TrainConfig resolve_config(const Context& c, int hops) {
  const Options& o = c.o;
  TrainConfig cfg;
  cfg.hops = hops;
  cfg.mode = feature_mode_from_string(o.mode);
  cfg.variant.aggregation = aggregation_from_string(o.agg);
  cfg.variant.soft_selection = !o.no_soft;
  cfg.variant.shared_w0 = o.shared_w0;
  cfg.variant.l2_norm = !o.no_l2;
  cfg.variant.hidden_relu = !o.no_relu;
  cfg.hidden = o.hidden;
  cfg.max_epochs = o.max_epochs;
  cfg.patience = o.patience;
  cfg.seed = o.seed;
  if (!o.preset.empty() && o.preset != "none") {
    PresetTable table = PresetTable::three_hop;
    if (o.preset == "auto")
      table = hops <= 3 ? PresetTable::three_hop : PresetTable::eight_hop;
    else
      table = preset_table_from_string(o.preset);
    const auto p = find_preset(table, c.name);
    if (!p) throw InputError("no preset for dataset '" + c.name + "'");
    apply_preset(*p, cfg);
  }
  if (o.lr_fc) cfg.lr_fc = *o.lr_fc;
  if (o.lr_sca) cfg.lr_sca = *o.lr_sca;
  if (o.wd_fc1) cfg.wd_fc1 = *o.wd_fc1;
  if (o.wd_fc2) cfg.wd_fc2 = *o.wd_fc2;
  if (o.wd_sca) cfg.wd_sca = *o.wd_sca;
  if (o.dropout) cfg.dropout = *o.dropout;
  cfg.validate();
  return cfg;
}

std::vector<std::string> config_argv(const TrainConfig& cfg) {
  std::vector<std::string> a = {
      "--hops", std::to_string(cfg.hops), "--mode", to_string(cfg.mode),
      "--agg", to_string(cfg.variant.aggregation),
      "--lr-fc", fmt(cfg.lr_fc), "--lr-sca", fmt(cfg.lr_sca),
      "--wd-fc1", fmt(cfg.wd_fc1), "--wd-fc2", fmt(cfg.wd_fc2), "--wd-sca", fmt(cfg.wd_sca),
      "--dropout", fmt(cfg.dropout), "--hidden", std::to_string(cfg.hidden),
      "--max-epochs", std::to_string(cfg.max_epochs), "--patience", std::to_string(cfg.patience),
      "--seed", std::to_string(cfg.seed)};
  if (!cfg.variant.soft_selection) a.push_back("--no-soft-selection");
  if (cfg.variant.shared_w0) a.push_back("--shared-w0");
  if (!cfg.variant.l2_norm) a.push_back("--no-l2");
  if (!cfg.variant.hidden_relu) a.push_back("--no-relu");
  return a;
}

std::vector<std::string> join_argv(std::initializer_list<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

fs::path output_dir(const Options& o) {
  fs::create_directories(o.out);
  return o.out;
}

std::string base_name(const Context& c, const TrainConfig& cfg) {
  const std::string tag = c.o.tag.empty() ? c.command : c.o.tag;
  return c.name + "_" + to_string(cfg.mode) + "_" + std::to_string(cfg.hops) + "hop_" + tag;
}

json envelope(const Context& c, const std::vector<std::string>& argv) {
  return {{"command", c.command},
          {"dataset", c.name},
          {"dataset_hash", hex(dataset_hash(c.bundle))},
          {"argv", argv}};
}

fs::path cache_path(const fs::path& dir, const std::string& name, int hops, HopMode mode) {
  return dir / (name + "_" + to_string(mode) + "_" + std::to_string(hops) + "hop.bin");
}

HopFeatures features_for(const Context& c, int hops, FeatureMode mode) {
  const HopMode hm = hop_mode_for(mode);
  if (c.o.cache_dir.empty()) return build_features(c.bundle, hops, hm);
  const CacheKey key{dataset_hash(c.bundle), hops, hm};
  const fs::path p = cache_path(c.o.cache_dir, c.name, hops, hm);
  if (cache_matches(p, key)) return cache_load(p, key);
  HopFeatures f = build_features(c.bundle, hops, hm);
  fs::create_directories(c.o.cache_dir);
  cache_store(f, key, p);
  return f;
}

void write_timing(const fs::path& path, double total, const std::vector<double>& per_trial) {
  write_json(path, {{"wall_seconds", total}, {"trial_wall_seconds", per_trial}});
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GridSpace grid_from_options(const Options& o, const TrainConfig& cfg, const std::string& fallback) {
  if (!o.grid_json.empty() || !o.grid_inline.empty()) {
    json j;
    if (!o.grid_inline.empty()) {
      try {
        j = json::parse(o.grid_inline);
      } catch (const json::exception& e) {
        throw InputError(std::string("--grid-inline: ") + e.what());
      }
    } else {
      j = read_json(o.grid_json);
    }
    GridSpace g = GridSpace::point(cfg);
    auto axis = [&](const char* key, std::vector<double>& dst) {
      if (j.contains(key)) dst = j.at(key).get<std::vector<double>>();
      if (dst.empty()) throw InputError(std::string("grid axis '") + key + "' is empty");
    };
    try {
      axis("wd_sca", g.wd_sca);
      axis("lr_sca", g.lr_sca);
      axis("wd_fc1", g.wd_fc1);
      axis("wd_fc2", g.wd_fc2);
      axis("lr_fc", g.lr_fc);
      axis("dropout", g.dropout);
    } catch (const json::exception& e) {
      throw InputError(o.grid_json + ": " + e.what());
    }
    return g;
  }
  const std::string kind = o.grid.empty() ? fallback : o.grid;
  if (kind == "full") return GridSpace::fsgnn_full();
  if (kind == "mlp") return GridSpace::mlp_study();
  if (kind == "point") return GridSpace::point(cfg);
  throw InputError("unknown grid '" + kind + "' (expected full|mlp|point)");
}

std::vector<std::string> grid_argv(const GridSpace& g) {
  const std::string list = to_json(g).dump();
  return {"--grid-inline", list};
}

json entry_json(const GridEntry& e) {
  json j = to_json(e.cfg);
  j["index"] = e.index;
  j["summary"] = to_json(e.summary, false);
  return j;
}

void print_row(const std::string& label, double mean, double sd) {
  std::cout << std::left << std::setw(40) << label << std::right << std::fixed << std::setprecision(2)
            << std::setw(8) << 100 * mean << " +- " << std::setw(5) << 100 * sd << '\n';
  std::cout.unsetf(std::ios::floatfield);
}

// ---- commands ----

int cmd_ingest(Context& c) {
  load_data(c);
  load_splits(c);
  const json report = ingestion_report(c.bundle, c.splits);
  const fs::path out = output_dir(c.o);
  const std::string tag = c.o.tag.empty() ? "ingest" : c.o.tag;
  json j = envelope(c, join_argv({{"ingest"}, c.data_argv, c.split_argv}));
  j["report"] = report;
  write_json(out / (c.name + "_" + tag + ".json"), j);
  std::cout << "dataset  " << c.name << "\n"
            << "nodes    " << report["n"] << "\n"
            << "edges    " << report["m"] << "\n"
            << "features " << report["d"] << "\n"
            << "classes  " << report["C"] << "\n"
            << "homophily " << std::fixed << std::setprecision(4)
            << report["homophily_ratio"].get<double>() << "\n";
  std::cout.unsetf(std::ios::floatfield);
  return kExitOk;
}

int cmd_precompute(Context& c) {
  load_data(c);
  const FeatureMode mode = feature_mode_from_string(c.o.mode);
  if (c.o.hops < 1) throw InputError("--hops must be >= 1");
  const HopMode hm = hop_mode_for(mode);
  const fs::path dir = c.o.cache_dir.empty() ? fs::path(c.o.out) / "cache" : fs::path(c.o.cache_dir);
  const CacheKey key{dataset_hash(c.bundle), c.o.hops, hm};
  const fs::path p = cache_path(dir, c.name, c.o.hops, hm);
  if (cache_matches(p, key)) {
    std::cout << "cache valid, skipped: " << p.string() << "\n";
    return kExitOk;
  }
  const HopFeatures f = build_features(c.bundle, c.o.hops, hm);
  fs::create_directories(dir);
  cache_store(f, key, p);
  std::cout << "wrote " << f.size() << " matrices to " << p.string() << "\n";
  return kExitOk;
}

int cmd_train(Context& c) {
  load_data(c);
  load_splits(c);
  const TrainConfig cfg = resolve_config(c, c.o.hops);
  if (c.o.split_index < 0 || c.o.split_index >= static_cast<int>(c.splits.size()))
    throw InputError("--split-index out of range (have " + std::to_string(c.splits.size()) + " splits)");
  const auto t0 = std::chrono::steady_clock::now();
  const HopFeatures f = features_for(c, cfg.hops, cfg.mode);
  TrainConfig trial = cfg;
  trial.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(c.o.split_index));
  TrainResult r;
  try {
    r = train(trial, c.bundle, f, c.splits[static_cast<std::size_t>(c.o.split_index)]);
  } catch (const std::exception& e) {
    throw TrialError("split " + std::to_string(c.o.split_index) + ": " + e.what());
  }
  const fs::path out = output_dir(c.o);
  const std::string base = base_name(c, cfg);
  std::vector<std::string> argv = join_argv({{"train"}, c.data_argv, c.split_argv, config_argv(cfg),
                                             {"--split-index", std::to_string(c.o.split_index)}});
  if (c.o.save_params) argv.push_back("--save-params");
  json j = envelope(c, argv);
  j["config"] = to_json(cfg);
  j["split_index"] = c.o.split_index;
  j["result"] = to_json(r);
  write_json(out / (base + ".json"), j);
  if (c.o.save_params) save_checkpoint(r.best_params, out / (base + ".params"));
  write_timing(out / (base + ".timing.json"), seconds_since(t0), {r.wall_seconds});
  std::cout << "best epoch " << r.best_epoch << " of " << r.epochs_run << ", val "
            << std::fixed << std::setprecision(4) << r.best_val_acc << ", test " << r.test_acc
            << "\n";
  std::cout.unsetf(std::ios::floatfield);
  return kExitOk;
}

int cmd_splits(Context& c) {
  load_data(c);
  load_splits(c);
  const TrainConfig cfg = resolve_config(c, c.o.hops);
  const auto t0 = std::chrono::steady_clock::now();
  const HopFeatures f = features_for(c, cfg.hops, cfg.mode);
  const SplitsSummary s = run_splits(cfg, c.bundle, f, c.splits, c.o.jobs);
  const fs::path out = output_dir(c.o);
  const std::string base = base_name(c, cfg);
  json j = envelope(c, join_argv({{"splits"}, c.data_argv, c.split_argv, config_argv(cfg)}));
  j["config"] = to_json(cfg);
  j["results"] = to_json(s);
  write_json(out / (base + ".json"), j);
  write_text(out / (base + ".csv"), splits_csv(s));
  std::vector<double> times;
  for (const auto& r : s.results) times.push_back(r.wall_seconds);
  write_timing(out / (base + ".timing.json"), seconds_since(t0), times);
  for (std::size_t i = 0; i < s.results.size(); ++i)
    print_row("split " + std::to_string(i), s.results[i].test_acc, 0);
  print_row("mean test accuracy", s.mean_test, s.std_test);
  return kExitOk;
}

int cmd_grid(Context& c) {
  load_data(c);
  load_splits(c);
  const TrainConfig cfg = resolve_config(c, c.o.hops);
  const GridSpace space = grid_from_options(c.o, cfg, "full");
  const auto t0 = std::chrono::steady_clock::now();
  const HopFeatures f = features_for(c, cfg.hops, cfg.mode);
  const GridReport rep = grid_search(space, cfg, c.bundle, f, c.splits, c.o.jobs);
  const fs::path out = output_dir(c.o);
  const std::string base = base_name(c, cfg);
  json j = envelope(c, join_argv({{"grid"}, c.data_argv, c.split_argv, config_argv(cfg), grid_argv(space)}));
  j["config"] = to_json(cfg);
  j["grid"] = to_json(space);
  json entries = json::array();
  for (const auto& e : rep.entries) entries.push_back(entry_json(e));
  j["entries"] = std::move(entries);
  j["best_index"] = rep.best().index;
  j["best_test_acc"] = rep.best().summary.mean_test;
  j["best_test_std"] = rep.best().summary.std_test;
  write_json(out / (base + ".json"), j);
  write_text(out / (base + ".csv"), grid_csv(rep));
  write_timing(out / (base + ".timing.json"), seconds_since(t0), {});
  std::cout << space.size() << " configurations, best index " << rep.best().index << " (val "
            << std::fixed << std::setprecision(4) << rep.best().summary.mean_val << ")\n";
  std::cout.unsetf(std::ios::floatfield);
  print_row("test accuracy of best config", rep.best().summary.mean_test, rep.best().summary.std_test);
  return kExitOk;
}

int cmd_study(Context& c) {
  load_data(c);
  load_splits(c);
  const TrainConfig cfg = resolve_config(c, c.o.hops);
  const FeatureSetting setting = feature_setting_from_string(c.o.setting);
  std::vector<nn::Aggregation> aggs;
  for (const auto& a : split_csv_list(c.o.aggs)) aggs.push_back(aggregation_from_string(a));
  if (aggs.empty()) throw InputError("--aggs is empty");
  const GridSpace space = grid_from_options(c.o, cfg, "mlp");
  const auto t0 = std::chrono::steady_clock::now();
  const HopFeatures f = features_for(c, cfg.hops, cfg.mode);
  const StudyTable t = feature_setting_study(c.bundle, f, c.splits, setting, aggs, cfg, space, c.o.jobs);
  const fs::path out = output_dir(c.o);
  const std::string base = base_name(c, cfg);
  json j = envelope(c, join_argv({{"study"}, c.data_argv, c.split_argv, config_argv(cfg),
                                  grid_argv(space), {"--setting", c.o.setting, "--aggs", c.o.aggs}}));
  j["config"] = to_json(cfg);
  j["grid"] = to_json(space);
  j["setting"] = to_string(setting);
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"features", r.label},
                    {"mask", r.mask.to_string()},
                    {"aggregation", to_string(r.aggregation)},
                    {"chosen", entry_json(r.chosen)}});
  j["rows"] = std::move(rows);
  j["best_row"] = t.best_row;
  write_json(out / (base + ".json"), j);
  write_text(out / (base + ".csv"), study_csv(t));
  write_timing(out / (base + ".timing.json"), seconds_since(t0), {});
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    print_row((i == t.best_row ? "* " : "  ") + t.rows[i].label + " [" +
                  to_string(t.rows[i].aggregation) + "]",
              t.rows[i].chosen.summary.mean_test, t.rows[i].chosen.summary.std_test);
  return kExitOk;
}

int cmd_ablate(Context& c) {
  load_data(c);
  load_splits(c);
  const TrainConfig cfg = resolve_config(c, c.o.hops);
  const GridSpace space = grid_from_options(c.o, cfg, "full");
  const auto t0 = std::chrono::steady_clock::now();
  const HopFeatures f = features_for(c, cfg.hops, cfg.mode);
  const auto rows = ablation_run(c.bundle, f, c.splits, space, cfg, c.o.jobs);
  const fs::path out = output_dir(c.o);
  const std::string base = base_name(c, cfg);
  json j = envelope(c, join_argv({{"ablate"}, c.data_argv, c.split_argv, config_argv(cfg), grid_argv(space)}));
  j["config"] = to_json(cfg);
  j["grid"] = to_json(space);
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"variant", r.variant},
                   {"mean_test_acc", r.mean_test},
                   {"std_test_acc", r.std_test},
                   {"per_config_test_acc", r.per_config}});
  j["variants"] = std::move(arr);
  write_json(out / (base + ".json"), j);
  write_text(out / (base + ".csv"), ablation_csv(rows));
  write_timing(out / (base + ".timing.json"), seconds_since(t0), {});
  for (const auto& r : rows) print_row(r.variant, r.mean_test, r.std_test);
  return kExitOk;
}

int cmd_sweep(Context& c) {
  load_data(c);
  load_splits(c);
  std::vector<int> hops;
  for (const auto& h : split_csv_list(c.o.hops_list)) {
    try {
      hops.push_back(std::stoi(h));
    } catch (const std::exception&) {
      throw InputError("bad --hops-list entry '" + h + "'");
    }
  }
  if (hops.empty()) throw InputError("--hops-list is empty");
  std::vector<TrainConfig> cfgs;
  for (int k : hops) cfgs.push_back(resolve_config(c, k));
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t next = 0;
  const auto points = hop_sweep(c.bundle, c.splits, hops, [&](int) { return cfgs.at(next++); }, c.o.jobs);
  const fs::path out = output_dir(c.o);
  const std::string tag = c.o.tag.empty() ? "sweep" : c.o.tag;
  const std::string base = c.name + "_" + c.o.mode + "_sweep_" + tag;
  std::vector<std::string> argv = join_argv({{"sweep"}, c.data_argv, c.split_argv, config_argv(cfgs.front())});
  if (!c.o.preset.empty() && c.o.preset != "none") {
    // hyperparameters come from the preset for each hop count
    const std::vector<std::string> keys = {"--lr-fc", "--lr-sca", "--wd-fc1", "--wd-fc2", "--wd-sca", "--dropout"};
    const std::vector<const std::optional<double>*> given = {&c.o.lr_fc, &c.o.lr_sca, &c.o.wd_fc1,
                                                             &c.o.wd_fc2, &c.o.wd_sca, &c.o.dropout};
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < argv.size(); ++i) {
      const auto k = std::find(keys.begin(), keys.end(), argv[i]);
      if (k != keys.end()) {
        const auto& opt = *given[static_cast<std::size_t>(k - keys.begin())];
        if (opt) kept.insert(kept.end(), {argv[i], fmt(*opt)});
        ++i;
        continue;
      }
      kept.push_back(argv[i]);
    }
    argv = std::move(kept);
    argv.insert(argv.end(), {"--preset", c.o.preset});
  }
  argv.insert(argv.end(), {"--hops-list", c.o.hops_list});
  json j = envelope(c, argv);
  json cj = json::array();
  for (const auto& cfg : cfgs) cj.push_back(to_json(cfg));
  j["configs"] = std::move(cj);
  json pts = json::array();
  for (const auto& p : points)
    pts.push_back({{"hops", p.hops}, {"branches", p.branches}, {"mean_test_acc", p.mean_test},
                   {"std_test_acc", p.std_test}});
  j["points"] = std::move(pts);
  write_json(out / (base + ".json"), j);
  write_text(out / (base + ".csv"), sweep_csv(points));
  write_timing(out / (base + ".timing.json"), seconds_since(t0), {});
  for (const auto& p : points) print_row(std::to_string(p.hops) + " hops", p.mean_test, p.std_test);
  return kExitOk;
}

/// Collects per-split alphas from a splits/grid/train result file.
void collect_alphas(const json& j, std::vector<TrainResult>& out) {
  auto take = [&](const json& r) {
    TrainResult t;
    t.branch_names = r.at("branches").get<std::vector<std::string>>();
    const auto a = r.at("alphas").get<std::vector<double>>();
    t.alphas = Eigen::Map<const VectorXr>(a.data(), static_cast<Index>(a.size()));
    out.push_back(std::move(t));
  };
  const std::string cmd = j.at("command").get<std::string>();
  if (cmd == "train") {
    take(j.at("result"));
  } else if (cmd == "splits") {
    for (const auto& r : j.at("results").at("splits")) take(r);
  } else if (cmd == "grid") {
    for (const auto& e : j.at("entries"))
      for (const auto& r : e.at("summary").at("splits")) take(r);
  } else {
    throw InputError("alphas: unsupported result type '" + cmd + "'");
  }
}

int cmd_alphas(Context& c) {
  if (c.o.inputs.empty()) throw InputError("alphas: no result files given");
  std::vector<std::string> order;
  std::map<std::string, std::vector<TrainResult>> by_group;
  std::vector<std::string> argv = {"alphas"};
  for (const auto& in : c.o.inputs) {
    const json j = read_json(in);
    try {
      const std::string ds = j.at("dataset").get<std::string>();
      if (!by_group.count(ds)) order.push_back(ds);
      collect_alphas(j, by_group[ds]);
    } catch (const json::exception& e) {
      throw InputError(in + ": " + e.what());
    }
    argv.push_back(fs::absolute(in).lexically_normal().string());
  }
  std::vector<AlphaGroup> groups;
  for (const auto& g : order) {
    AlphaGroup ag{g, {}};
    for (const auto& r : by_group[g]) ag.results.push_back(&r);
    groups.push_back(std::move(ag));
  }
  const AlphaReport rep = export_alpha_report(groups);
  const fs::path out = output_dir(c.o);
  const std::string tag = c.o.tag.empty() ? "report" : c.o.tag;
  const std::string base = "alphas_" + tag;
  json rows = json::object();
  for (std::size_t i = 0; i < rep.rows.size(); ++i)
    rows[rep.row_names[i]] =
        std::vector<double>(rep.rows[i].data(), rep.rows[i].data() + rep.rows[i].size());
  write_json(out / (base + ".json"),
             {{"command", "alphas"}, {"argv", argv}, {"branches", rep.branch_names}, {"mean_alpha", rows}});
  write_text(out / (base + ".csv"), rep.to_csv());
  std::cout << rep.to_csv();
  return kExitOk;
}

int cmd_synth(Context& c) {
  const Options& o = c.o;
  DatasetBundle b;
  if (o.kind == "csbm") {
    CsbmOptions so;
    so.nodes = o.nodes;
    so.classes = o.classes;
    so.dims = o.dims;
    so.avg_degree = o.avg_degree;
    so.homophily = o.homophily;
    so.seed = o.seed;
    b = make_csbm(so);
  } else if (o.kind == "planted-self" || o.kind == "planted-none") {
    PlantedPairOptions po;
    po.pairs_per_class = o.pairs_per_class;
    po.classes = o.classes;
    po.noise_dims = o.dims;
    po.planted = o.kind == "planted-self" ? LoopMode::self_loop : LoopMode::none;
    po.seed = o.seed;
    b = make_planted_pairs(po);
  } else {
    throw InputError("unknown --kind '" + o.kind + "' (expected csbm|planted-self|planted-none)");
  }
  if (o.n_splits < 0) throw InputError("--n must be >= 0");
  if (o.fractions.size() != 3) throw InputError("--split-fractions needs three values");
  const fs::path dir = o.out;
  fs::create_directories(dir / "splits");
  write_node_file(dir / kNodeFileName, b.features, b.labels());
  const auto edges = b.graph.edge_list();
  write_edge_file(dir / kEdgeFileName, edges);
  const std::array<double, 3> fr{o.fractions[0], o.fractions[1], o.fractions[2]};
  for (int i = 0; i < o.n_splits; ++i)
    write_split_file(dir / "splits" / ("split_" + std::to_string(i) + ".txt"),
                     make_random_split(b.labels(), b.num_classes(), fr,
                                       derive_seed(o.split_seed, static_cast<std::uint64_t>(i))));
  std::cout << "wrote " << b.num_nodes() << " nodes, " << b.graph.num_edges() << " edges, "
            << o.n_splits << " splits to " << dir.string() << "\n";
  return kExitOk;
}

int dispatch(Context& c);

int cmd_replay(Context& c) {
  const json j = read_json(c.o.replay_file);
  std::vector<std::string> argv;
  try {
    argv = j.at("argv").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw InputError(c.o.replay_file + ": " + e.what());
  }
  if (argv.empty() || argv.front() == "replay") throw InputError("replay: bad recorded argv");
  const std::string out =
      c.o.out.empty() ? fs::path(c.o.replay_file).parent_path().string() : c.o.out;
  argv.push_back("--out");
  argv.push_back(out.empty() ? "." : out);
  if (!c.o.tag.empty()) {
    argv.push_back("--tag");
    argv.push_back(c.o.tag);
  }
  return run_cli(argv);
}

void add_data_options(CLI::App* s, Options& o) {
  s->add_option("--data-dir", o.data_dir, "Dataset directory with node and edge files");
  s->add_option("--dataset", o.dataset, "Dataset name under --data-root");
  s->add_option("--data-root", o.data_root, "Root holding dataset directories (default $FSGNN_DATA_ROOT)");
  s->add_option("--name", o.name, "Dataset name used in outputs and preset lookup");
  s->add_option("--feature-encoding", o.encoding, "dense|index_list")->check(CLI::IsMember({"dense", "index_list"}));
  s->add_option("--feature-width", o.width, "Feature width for index_list encoding")->check(CLI::NonNegativeNumber);
}

void add_split_options(CLI::App* s, Options& o) {
  s->add_option("--split-file", o.split_files, "Split file (repeatable); default <dir>/splits/split_<i>.txt")
      ->check(CLI::ExistingFile);
  s->add_option("--n", o.n_splits, "Number of splits");
  s->add_option("--split-seed", o.split_seed, "Seed for random stratified splits");
  s->add_option("--split-fractions", o.fractions, "Train, val, test fractions")->expected(3);
}

void add_output_options(CLI::App* s, Options& o) {
  s->add_option("--out", o.out, "Output directory");
  s->add_option("--tag", o.tag, "Suffix of output file names");
}

void add_model_options(CLI::App* s, Options& o) {
  s->add_option("--hops", o.hops, "Number of hops K")->check(CLI::PositiveNumber);
  s->add_option("--mode", o.mode, "all|homo|hetero")->check(CLI::IsMember({"all", "homo", "hetero"}));
  s->add_option("--agg", o.agg, "cat|sum")->check(CLI::IsMember({"cat", "concat", "sum"}));
  s->add_flag("--no-soft-selection", o.no_soft, "Disable softmax hop weights");
  s->add_flag("--shared-w0", o.shared_w0, "Share the first-layer weight across hops");
  s->add_flag("--no-l2", o.no_l2, "Disable row L2 normalization");
  s->add_flag("--no-relu", o.no_relu, "Drop the hidden ReLU");
  s->add_option("--lr-fc", o.lr_fc, "Learning rate of the linear layers");
  s->add_option("--lr-sca", o.lr_sca, "Learning rate of the hop weights");
  s->add_option("--wd-fc1", o.wd_fc1, "Weight decay of the first layer");
  s->add_option("--wd-fc2", o.wd_fc2, "Weight decay of the second layer");
  s->add_option("--wd-sca", o.wd_sca, "Weight decay of the hop weights");
  s->add_option("--dropout", o.dropout, "Dropout rate");
  s->add_option("--preset", o.preset, "3hop|8hop|auto|none: published best settings by dataset")
      ->check(CLI::IsMember({"3hop", "8hop", "auto", "none"}));
  s->add_option("--hidden", o.hidden, "Hidden width per hop")->check(CLI::PositiveNumber);
  s->add_option("--max-epochs", o.max_epochs, "Epoch limit")->check(CLI::PositiveNumber);
  s->add_option("--patience", o.patience, "Early stopping patience")->check(CLI::PositiveNumber);
  s->add_option("--seed", o.seed, "Master seed");
  s->add_option("--jobs", o.jobs, "Concurrent trials")->check(CLI::PositiveNumber);
  s->add_option("--cache-dir", o.cache_dir, "Reuse hop features from this cache directory");
}

void add_grid_options(CLI::App* s, Options& o) {
  s->add_option("--grid", o.grid, "full|mlp|point")->check(CLI::IsMember({"full", "mlp", "point"}));
  s->add_option("--grid-json", o.grid_json, "JSON file with axis lists")->check(CLI::ExistingFile);
}

int dispatch(Context& c) {
  if (c.command == "ingest") return cmd_ingest(c);
  if (c.command == "precompute") return cmd_precompute(c);
  if (c.command == "train") return cmd_train(c);
  if (c.command == "splits") return cmd_splits(c);
  if (c.command == "grid") return cmd_grid(c);
  if (c.command == "study") return cmd_study(c);
  if (c.command == "ablate") return cmd_ablate(c);
  if (c.command == "sweep") return cmd_sweep(c);
  if (c.command == "alphas") return cmd_alphas(c);
  if (c.command == "synth") return cmd_synth(c);
  if (c.command == "replay") return cmd_replay(c);
  throw InputError("unknown command " + c.command);
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
  Context c;
  Options& o = c.o;
  CLI::App app{"Feature-selection graph neural network toolkit"};
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "Parse a dataset and report its statistics");
  add_data_options(ingest, o);
  add_split_options(ingest, o);
  add_output_options(ingest, o);

  auto* pre = app.add_subcommand("precompute", "Write the hop feature cache");
  add_data_options(pre, o);
  add_output_options(pre, o);
  pre->add_option("--hops", o.hops, "Number of hops K")->check(CLI::PositiveNumber);
  pre->add_option("--mode", o.mode, "all|homo|hetero")->check(CLI::IsMember({"all", "homo", "hetero"}));
  pre->add_option("--cache-dir", o.cache_dir, "Cache directory (default <out>/cache)");

  auto add_run = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    add_data_options(s, o);
    add_split_options(s, o);
    add_output_options(s, o);
    add_model_options(s, o);
    return s;
  };
  auto* tr = add_run("train", "Train on one split");
  tr->add_option("--split-index", o.split_index, "Which split to train on");
  tr->add_flag("--save-params", o.save_params, "Write the best parameters next to the result");
  add_run("splits", "Train on every split and report mean and std");
  auto* grid = add_run("grid", "Grid search scored on validation accuracy");
  add_grid_options(grid, o);
  grid->add_option("--grid-inline", o.grid_inline)->group("");
  auto* study = add_run("study", "Single, all and sub feature studies");
  add_grid_options(study, o);
  study->add_option("--grid-inline", o.grid_inline)->group("");
  study->add_option("--setting", o.setting, "single|all|sub")->check(CLI::IsMember({"single", "all", "sub"}));
  study->add_option("--aggs", o.aggs, "Comma-separated aggregations");
  auto* abl = add_run("ablate", "Mean accuracy over a grid for each model variant");
  add_grid_options(abl, o);
  abl->add_option("--grid-inline", o.grid_inline)->group("");
  auto* sweep = add_run("sweep", "Accuracy versus number of hops");
  sweep->add_option("--hops-list", o.hops_list, "Comma-separated hop counts");

  auto* alphas = app.add_subcommand("alphas", "Average learned hop weights from result files");
  alphas->add_option("inputs", o.inputs, "Result JSON files")->required()->check(CLI::ExistingFile);
  add_output_options(alphas, o);

  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset directory");
  synth->add_option("--kind", o.kind, "csbm|planted-self|planted-none");
  synth->add_option("--nodes", o.nodes, "Nodes (csbm)")->check(CLI::PositiveNumber);
  synth->add_option("--classes", o.classes, "Classes")->check(CLI::PositiveNumber);
  synth->add_option("--dims", o.dims, "Feature width (noise width for planted)")->check(CLI::PositiveNumber);
  synth->add_option("--homophily", o.homophily, "Edge homophily (csbm)");
  synth->add_option("--avg-degree", o.avg_degree, "Average degree (csbm)");
  synth->add_option("--pairs-per-class", o.pairs_per_class, "Pairs per class (planted)");
  synth->add_option("--seed", o.seed, "Generator seed");
  synth->add_option("--n", o.n_splits, "Split files to write");
  synth->add_option("--split-seed", o.split_seed, "Seed for the split files");
  synth->add_option("--split-fractions", o.fractions, "Train, val, test fractions")->expected(3);
  synth->add_option("--out", o.out, "Output dataset directory")->required();

  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a result file");
  replay->add_option("file", o.replay_file, "Result JSON")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", o.out, "Output directory (default: next to the file)");
  replay->add_option("--tag", o.tag, "Override the recorded tag");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }
  for (auto* s : app.get_subcommands()) c.command = s->get_name();
  if (c.command == "replay" && replay->count("--out") == 0) o.out.clear();

  try {
    return dispatch(c);
  } catch (const TrialError& e) {
    std::cerr << "error: trial failed: " << e.what() << "\n";
    return kExitTrialFailure;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTrialFailure;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTrialFailure;
  }
}

} // namespace fsgnn::cli
