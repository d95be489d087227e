#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fairpoison/attacks.hpp"
#include "fairpoison/csv.hpp"
#include "fairpoison/dataspace.hpp"
#include "fairpoison/errors.hpp"
#include "fairpoison/fairmetrics.hpp"
#include "fairpoison/linmodel.hpp"
#include "fairpoison/rng.hpp"
#include "fairpoison/sanitizer.hpp"
#include "fairpoison/schema.hpp"
#include "fairpoison/types.hpp"

namespace fairpoison {

inline constexpr const char* kToolName = "fairpoison";
inline constexpr const char* kToolVersion = "0.1.0";

/// Generation seed of the built-in synthetic dataset; fixed so the dataset is
/// the same artifact in every run.
inline constexpr std::uint64_t kBuiltinSyntheticSeed = 8451842;

/// Built-in 2-D benchmark data: one Gaussian cell per (label, group)
/// combination, 125 points each (500 total), unit spread. Classes separate
/// along the first coordinate, groups along the second, so a clean model is
/// nearly group-blind.
inline SyntheticSpec builtin_synthetic_spec() {
  SyntheticSpec s;
  auto mean = [](double a, double b) {
    Eigen::VectorXd m(2);
    m << a, b;
    return m;
  };
  s.pos_adv = {125, mean(2.0, 1.0), 1.0};
  s.pos_dis = {125, mean(2.0, -1.0), 1.0};
  s.neg_adv = {125, mean(-2.0, 1.0), 1.0};
  s.neg_dis = {125, mean(-2.0, -1.0), 1.0};
  return s;
}

inline const std::vector<std::string>& known_attacks() {
  static const std::vector<std::string> names = {"iaf", "koh", "solans", "raa", "nraa"};
  return names;
}

struct ExperimentConfig {
  std::string data_path;    // CSV input; empty when use_synthetic
  std::string schema_path;
  bool use_synthetic = false;
  std::string out_dir = "results";
  std::vector<std::string> attacks = known_attacks();
  std::vector<double> epsilon_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> lambda_grid = {1.0};  // iaf only
  double train_fraction = 0.8;
  std::uint64_t master_seed = 42;
  int repeats = 1;
  TrainSettings train;
  AttackConfig attack_defaults;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t c = s.find(',', pos);
    const std::string item = trim(s.substr(pos, c == std::string_view::npos ? s.size() - pos : c - pos));
    if (!item.empty()) out.push_back(item);
    if (c == std::string_view::npos) break;
    pos = c + 1;
  }
  return out;
}

inline double to_double(const std::string& s, const std::string& key) {
  double v = 0.0;
  if (!parse_double(s, v)) throw ConfigError("key '" + key + "': cannot parse number '" + s + "'");
  return v;
}

inline std::int64_t to_int(const std::string& s, const std::string& key) {
  const double v = to_double(s, key);
  const auto i = static_cast<std::int64_t>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("key '" + key + "': expected an integer, got '" + s + "'");
  return i;
}

inline bool to_flag(const std::string& s, const std::string& key) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw ConfigError("key '" + key + "': expected on/off, got '" + s + "'");
}

}  // namespace detail

/// Experiment files use the same key-value grammar as dataset schemas.
/// Recognized keys: data, schema, synthetic, out, attacks, epsilon_grid,
/// lambda_grid, train_fraction, seed, repeats, reg, smoothing, train_tol,
/// train_max_iters, eta, tau, sigma, attack_iters, stop_tol, patience,
/// defense_q, slab, swap_groups.
inline ExperimentConfig parse_experiment_config(std::string_view text) {
  const KeyValueFile kv = KeyValueFile::parse(text);
  static const std::set<std::string> known = {
      "data", "schema", "synthetic", "out", "attacks", "epsilon_grid", "lambda_grid",
      "train_fraction", "seed", "repeats", "reg", "smoothing", "train_tol",
      "train_max_iters", "eta", "tau", "sigma", "attack_iters", "stop_tol",
      "patience", "defense_q", "slab", "swap_groups"};
  for (const auto& e : kv.entries())
    if (!known.count(e.key))
      throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");

  ExperimentConfig cfg;
  if (auto v = kv.get("data")) cfg.data_path = *v;
  if (auto v = kv.get("schema")) cfg.schema_path = *v;
  if (auto v = kv.get("synthetic")) {
    if (*v != "demo") throw ConfigError("synthetic: only the built-in spec 'demo' exists");
    cfg.use_synthetic = true;
  }
  if (auto v = kv.get("out")) cfg.out_dir = *v;
  if (auto v = kv.get("attacks")) {
    cfg.attacks = detail::split_list(*v);
    if (cfg.attacks.empty()) throw ConfigError("attacks: empty list");
    for (const auto& a : cfg.attacks) {
      const auto& ok = known_attacks();
      if (std::find(ok.begin(), ok.end(), a) == ok.end())
        throw ConfigError("attacks: unknown attack '" + a + "'");
    }
  }
  if (auto v = kv.get("epsilon_grid")) {
    cfg.epsilon_grid.clear();
    for (const auto& s : detail::split_list(*v))
      cfg.epsilon_grid.push_back(detail::to_double(s, "epsilon_grid"));
    if (cfg.epsilon_grid.empty()) throw ConfigError("epsilon_grid: empty list");
  }
  for (const double e : cfg.epsilon_grid)
    if (!(e > 0.0)) throw ConfigError("epsilon_grid: values must be positive");
  if (auto v = kv.get("lambda_grid")) {
    cfg.lambda_grid.clear();
    for (const auto& s : detail::split_list(*v))
      cfg.lambda_grid.push_back(detail::to_double(s, "lambda_grid"));
    if (cfg.lambda_grid.empty()) throw ConfigError("lambda_grid: empty list");
  }
  if (auto v = kv.get("train_fraction")) cfg.train_fraction = detail::to_double(*v, "train_fraction");
  if (auto v = kv.get("seed")) cfg.master_seed = static_cast<std::uint64_t>(detail::to_int(*v, "seed"));
  if (auto v = kv.get("repeats")) cfg.repeats = static_cast<int>(detail::to_int(*v, "repeats"));
  if (cfg.repeats < 1) throw ConfigError("repeats: must be at least 1");

  if (auto v = kv.get("reg")) cfg.train.reg = detail::to_double(*v, "reg");
  if (auto v = kv.get("smoothing")) cfg.train.smoothing = detail::to_double(*v, "smoothing");
  if (auto v = kv.get("train_tol")) cfg.train.tol = detail::to_double(*v, "train_tol");
  if (auto v = kv.get("train_max_iters"))
    cfg.train.max_iters = static_cast<int>(detail::to_int(*v, "train_max_iters"));
  if (!(cfg.train.reg > 0.0)) throw ConfigError("reg: must be positive");
  if (!(cfg.train.smoothing > 0.0)) throw ConfigError("smoothing: must be positive");
  if (!(cfg.train.tol > 0.0)) throw ConfigError("train_tol: must be positive");

  if (auto v = kv.get("eta")) cfg.attack_defaults.eta = detail::to_double(*v, "eta");
  if (auto v = kv.get("tau")) cfg.attack_defaults.tau = detail::to_double(*v, "tau");
  if (auto v = kv.get("sigma")) cfg.attack_defaults.sigma = detail::to_double(*v, "sigma");
  if (auto v = kv.get("attack_iters"))
    cfg.attack_defaults.max_iters = static_cast<int>(detail::to_int(*v, "attack_iters"));
  if (auto v = kv.get("stop_tol")) cfg.attack_defaults.stop_tol = detail::to_double(*v, "stop_tol");
  if (auto v = kv.get("patience"))
    cfg.attack_defaults.patience = static_cast<int>(detail::to_int(*v, "patience"));
  if (auto v = kv.get("defense_q")) cfg.attack_defaults.defense_q = detail::to_double(*v, "defense_q");
  if (auto v = kv.get("slab")) cfg.attack_defaults.slab_enabled = detail::to_flag(*v, "slab");
  if (auto v = kv.get("swap_groups"))
    cfg.attack_defaults.swap_groups = detail::to_flag(*v, "swap_groups");

  if (!cfg.use_synthetic && cfg.data_path.empty())
    throw ConfigError("config needs either 'data' + 'schema' or 'synthetic = demo'");
  if (!cfg.use_synthetic && cfg.schema_path.empty())
    throw ConfigError("'data' requires a 'schema' path");
  return cfg;
}

// ---------------------------------------------------------------------------
// Cell execution
// ---------------------------------------------------------------------------

/// Immutable inputs shared by every cell of a sweep: the standardized splits,
/// the clean model and its metrics. Derived from the master seed only, so
/// before-attack numbers are identical across attacks.
struct PreparedData {
  Dataset train;
  Dataset test;
  FeatureScaling scaling;
  TrainResult clean_model;
  MetricReport before;
};

inline PreparedData prepare_data(const ExperimentConfig& cfg) {
  Dataset raw;
  if (cfg.use_synthetic) {
    raw = gen_synthetic(builtin_synthetic_spec(), kBuiltinSyntheticSeed);
    raw.provenance = "synthetic:demo seed=" + std::to_string(kBuiltinSyntheticSeed);
  } else {
    const std::string schema_text = detail::read_file(cfg.schema_path);
    const DatasetSchema schema = parse_schema(schema_text);
    raw = load_csv(detail::read_file(cfg.data_path), schema);
    std::ostringstream tag;
    tag << cfg.data_path << "#schema:" << std::hex << hash_bytes(schema_text);
    raw.provenance = tag.str();
  }

  PreparedData prep;
  auto [train_raw, test_raw] =
      split_train_test(raw, cfg.train_fraction, derive_seed(cfg.master_seed, "split"));
  auto [train_std, scaling] = standardize(train_raw);
  prep.train = std::move(train_std);
  prep.scaling = std::move(scaling);
  prep.test = apply_scaling(test_raw, prep.scaling);
  prep.clean_model = train(prep.train, cfg.train, derive_seed(cfg.master_seed, "clean-train"));
  prep.before = evaluate_metrics(prep.clean_model.params, prep.test);
  return prep;
}

struct CellResult {
  std::string attack;
  double epsilon = 0.0;
  std::optional<double> lambda;  // set for iaf cells only
  int repeat = 0;
  std::uint64_t seed = 0;
  MetricReport before;
  MetricReport after;
  bool ok = true;
  std::string error;
  AttackResult attack_result;
  double duration_seconds = 0.0;  // reported in the manifest, never in results.json
};

struct ResultsTable {
  ExperimentConfig config;
  std::vector<CellResult> cells;

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : cells)
      if (!c.ok) ++n;
    return n;
  }
};

inline std::uint64_t cell_seed(std::uint64_t master, const std::string& attack, double epsilon,
                               std::optional<double> lambda, int repeat) {
  // Lambda participates only when it is part of the cell's identity, so
  // non-iaf cells are unaffected by the lambda grid.
  const std::uint64_t lam_bits = lambda ? double_bits(*lambda) : 0x6e6f6e65ULL;  // "none"
  std::uint64_t s = derive_seed(master, "cell:" + attack, double_bits(epsilon), lam_bits);
  return derive_seed(s, "repeat", static_cast<std::uint64_t>(repeat));
}

inline AttackResult dispatch_attack(const std::string& attack, const Dataset& clean,
                                    const Dataset& test, const AttackConfig& cfg) {
  if (attack == "iaf") return influence_attack(clean, test, LossKind::iaf, cfg);
  if (attack == "koh") return influence_attack(clean, test, LossKind::koh, cfg);
  if (attack == "solans") return influence_attack(clean, test, LossKind::solans, cfg);
  if (attack == "raa") return anchoring_attack(clean, test, AnchorMode::random, cfg);
  if (attack == "nraa") return anchoring_attack(clean, test, AnchorMode::nonrandom, cfg);
  throw ConfigError("unknown attack '" + attack + "'");
}

inline CellResult run_cell_prepared(const ExperimentConfig& cfg, const PreparedData& prep,
                                    const std::string& attack, double epsilon,
                                    std::optional<double> lambda, int repeat = 0) {
  CellResult cell;
  cell.attack = attack;
  cell.epsilon = epsilon;
  cell.lambda = lambda;
  cell.repeat = repeat;
  cell.seed = cell_seed(cfg.master_seed, attack, epsilon, lambda, repeat);
  cell.before = prep.before;

  AttackConfig acfg = cfg.attack_defaults;
  acfg.train = cfg.train;
  acfg.epsilon = epsilon;
  if (lambda) acfg.lambda = *lambda;
  acfg.seed = cell.seed;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    cell.attack_result = dispatch_attack(attack, prep.train, prep.test, acfg);
    cell.after = evaluate_metrics(cell.attack_result.final_model, prep.test);
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.error = e.what();
  }
  cell.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cell;
}

/// Single-cell entry point; loads and prepares data itself.
inline CellResult run_cell(const ExperimentConfig& cfg, const std::string& attack, double epsilon,
                           std::optional<double> lambda, int repeat = 0) {
  const PreparedData prep = prepare_data(cfg);
  return run_cell_prepared(cfg, prep, attack, epsilon, lambda, repeat);
}

/// Runs every (attack, epsilon[, lambda], repeat) cell. Cells are pure
/// share-nothing functions, so any worker count gives the same table; rows
/// come back sorted by (attack, epsilon, lambda, repeat).
inline ResultsTable sweep(const ExperimentConfig& cfg, int jobs = 1) {
  struct Key {
    std::string attack;
    double epsilon;
    std::optional<double> lambda;
    int repeat;
  };
  std::vector<Key> keys;
  for (const auto& attack : cfg.attacks) {
    const bool uses_lambda = attack == "iaf";
    const std::vector<std::optional<double>> lambdas =
        uses_lambda ? [&] {
          std::vector<std::optional<double>> ls;
          for (double l : cfg.lambda_grid) ls.emplace_back(l);
          return ls;
        }()
                    : std::vector<std::optional<double>>{std::nullopt};
    for (const double eps : cfg.epsilon_grid)
      for (const auto& lam : lambdas)
        for (int r = 0; r < cfg.repeats; ++r) keys.push_back({attack, eps, lam, r});
  }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.attack != b.attack) return a.attack < b.attack;
    if (a.epsilon != b.epsilon) return a.epsilon < b.epsilon;
    if (a.lambda.has_value() != b.lambda.has_value()) return !a.lambda.has_value();
    if (a.lambda && b.lambda && *a.lambda != *b.lambda) return *a.lambda < *b.lambda;
    return a.repeat < b.repeat;
  });

  const PreparedData prep = prepare_data(cfg);

  ResultsTable table;
  table.config = cfg;
  table.cells.resize(keys.size());

  const int workers = std::max(1, jobs);
  if (workers == 1) {
    for (std::size_t i = 0; i < keys.size(); ++i)
      table.cells[i] = run_cell_prepared(cfg, prep, keys[i].attack, keys[i].epsilon,
                                         keys[i].lambda, keys[i].repeat);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= keys.size()) return;
        table.cells[i] = run_cell_prepared(cfg, prep, keys[i].attack, keys[i].epsilon,
                                           keys[i].lambda, keys[i].repeat);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return table;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

using json = nlohmann::ordered_json;

inline json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const LabeledPoint& p) {
  return json{{"x", to_json(p.x)}, {"y", p.y}, {"z", p.z}};
}

inline json to_json(const ModelParams& m) {
  return json{{"w", to_json(m.w)}, {"b", m.b}};
}

inline json to_json(const MetricReport& r) {
  return json{{"spd", r.spd},
              {"eod", r.eod},
              {"test_error", r.test_error},
              {"pos_rate_adv", r.rates.pos_rate_adv},
              {"pos_rate_dis", r.rates.pos_rate_dis},
              {"tpr_adv", r.rates.tpr_adv},
              {"tpr_dis", r.rates.tpr_dis}};
}

inline json to_json(const FeasibleSet& fs) {
  json j{{"percentile", fs.percentile},
         {"slab_enabled", fs.slab_enabled},
         {"centroid_pos", to_json(fs.centroid_pos)},
         {"centroid_neg", to_json(fs.centroid_neg)},
         {"radius_pos", fs.radius_pos},
         {"radius_neg", fs.radius_neg}};
  if (fs.slab_active()) {
    j["slab_axis"] = to_json(fs.slab_axis);
    j["slab_midpoint"] = to_json(fs.slab_midpoint);
    j["slab_pos"] = fs.slab_pos;
    j["slab_neg"] = fs.slab_neg;
  }
  return j;
}

inline json to_json(const PoisonSet& ps) {
  json j;
  j["count_pos"] = ps.count_pos;
  j["count_neg"] = ps.count_neg;
  j["prototype_pos"] = ps.prototype_pos ? to_json(*ps.prototype_pos) : json(nullptr);
  j["prototype_neg"] = ps.prototype_neg ? to_json(*ps.prototype_neg) : json(nullptr);
  j["target_neg"] = ps.target_neg ? to_json(*ps.target_neg) : json(nullptr);
  j["target_pos"] = ps.target_pos ? to_json(*ps.target_pos) : json(nullptr);
  json exp = json::array();
  for (const auto& p : ps.expanded) exp.push_back(to_json(p));
  j["expanded"] = std::move(exp);
  return j;
}

inline json to_json(const AttackResult& r) {
  json traj = json::array();
  for (const auto& t : r.trajectory)
    traj.push_back(json{{"l_adv", t.l_adv},
                        {"spd", t.spd},
                        {"eod", t.eod},
                        {"test_error", t.test_error}});
  return json{{"poison", to_json(r.poison)},
              {"final_model", to_json(r.final_model)},
              {"final_model_converged", r.final_model_converged},
              {"feasible", to_json(r.feasible)},
              {"trajectory", std::move(traj)},
              {"iterations_run", r.iterations_run},
              {"converged", r.converged},
              {"all_trainings_converged", r.all_trainings_converged},
              {"hessian_condition_estimate", r.hessian_condition_estimate},
              {"best_l_adv", r.best_l_adv},
              {"best_iteration", r.best_iteration}};
}

inline json to_json(const ExperimentConfig& cfg) {
  json j;
  j["data"] = cfg.data_path;
  j["schema"] = cfg.schema_path;
  j["synthetic"] = cfg.use_synthetic;
  j["out"] = cfg.out_dir;
  j["attacks"] = cfg.attacks;
  j["epsilon_grid"] = cfg.epsilon_grid;
  j["lambda_grid"] = cfg.lambda_grid;
  j["train_fraction"] = cfg.train_fraction;
  j["seed"] = cfg.master_seed;
  j["repeats"] = cfg.repeats;
  j["train"] = json{{"reg", cfg.train.reg},
                    {"smoothing", cfg.train.smoothing},
                    {"tol", cfg.train.tol},
                    {"max_iters", cfg.train.max_iters},
                    {"bias_damping", cfg.train.bias_damping}};
  j["attack_defaults"] = json{{"eta", cfg.attack_defaults.eta},
                              {"tau", cfg.attack_defaults.tau},
                              {"sigma", cfg.attack_defaults.sigma},
                              {"max_iters", cfg.attack_defaults.max_iters},
                              {"stop_tol", cfg.attack_defaults.stop_tol},
                              {"patience", cfg.attack_defaults.patience},
                              {"defense_q", cfg.attack_defaults.defense_q},
                              {"slab", cfg.attack_defaults.slab_enabled},
                              {"swap_groups", cfg.attack_defaults.swap_groups}};
  return j;
}

inline json to_json(const CellResult& c) {
  json j;
  j["attack"] = c.attack;
  j["epsilon"] = c.epsilon;
  j["lambda"] = c.lambda ? json(*c.lambda) : json(nullptr);
  j["repeat"] = c.repeat;
  j["seed"] = c.seed;
  j["ok"] = c.ok;
  j["error"] = c.error;
  j["before"] = to_json(c.before);
  j["after"] = c.ok ? to_json(c.after) : json(nullptr);
  j["attack_result"] = c.ok ? to_json(c.attack_result) : json(nullptr);
  return j;
}

inline json results_json(const ResultsTable& table) {
  json j;
  j["schema_version"] = 1;
  j["tool"] = std::string(kToolName) + " " + kToolVersion;
  j["config"] = to_json(table.config);
  json cells = json::array();
  for (const auto& c : table.cells) cells.push_back(to_json(c));
  j["cells"] = std::move(cells);
  return j;
}

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  std::string s = ss.str();
  // Shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    std::ostringstream t;
    t.precision(prec);
    t << v;
    double back = 0.0;
    if (parse_double(t.str(), back) && back == v) return t.str();
  }
  return s;
}

/// One flat CSV per metric: header attack,epsilon,lambda,value; value is the
/// post-attack metric, averaged when repeats > 1. Failed cells emit no row.
inline std::string metric_csv(const ResultsTable& table, double MetricReport::*field) {
  std::string out = "attack,epsilon,lambda,value\n";
  std::size_t i = 0;
  while (i < table.cells.size()) {
    // Cells arrive sorted; repeats of one grid point are adjacent.
    std::size_t j = i;
    double sum = 0.0;
    std::size_t n_ok = 0;
    while (j < table.cells.size() && table.cells[j].attack == table.cells[i].attack &&
           table.cells[j].epsilon == table.cells[i].epsilon &&
           table.cells[j].lambda == table.cells[i].lambda) {
      if (table.cells[j].ok) {
        sum += table.cells[j].after.*field;
        ++n_ok;
      }
      ++j;
    }
    if (n_ok > 0) {
      const auto& c = table.cells[i];
      out += c.attack;
      out += ',';
      out += format_double(c.epsilon);
      out += ',';
      if (c.lambda) out += format_double(*c.lambda);
      out += ',';
      out += format_double(sum / static_cast<double>(n_ok));
      out += '\n';
    }
    i = j;
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file '" + path.string() + "'");
  out << content;
  if (!out) throw DataError("error writing file '" + path.string() + "'");
}

}  // namespace detail

/// Writes results.json, spd.csv, eod.csv, test_error.csv and manifest.txt
/// under outdir. Everything except the manifest is a pure function of the
/// table, so re-emitting an identical table gives byte-identical files.
inline void emit_results(const ResultsTable& table, const std::filesystem::path& outdir) {
  if (table.cells.empty()) throw DataError("emit_results: empty results table");
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw DataError("cannot create output directory '" + outdir.string() + "'");

  const std::string results = results_json(table).dump(2) + "\n";
  detail::write_file(outdir / "results.json", results);
  detail::write_file(outdir / "spd.csv", detail::metric_csv(table, &MetricReport::spd));
  detail::write_file(outdir / "eod.csv", detail::metric_csv(table, &MetricReport::eod));
  detail::write_file(outdir / "test_error.csv",
                     detail::metric_csv(table, &MetricReport::test_error));

  double total_duration = 0.0;
  for (const auto& c : table.cells) total_duration += c.duration_seconds;
  const std::time_t now = std::time(nullptr);
  char stamp[64];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));

  std::ostringstream manifest;
  manifest << "tool = " << kToolName << " " << kToolVersion << "\n"
           << "created = " << stamp << "\n"
           << "master_seed = " << table.config.master_seed << "\n"
           << "config_hash = " << std::hex << hash_bytes(to_json(table.config).dump()) << std::dec
           << "\n"
           << "cells = " << table.cells.size() << "\n"
           << "failures = " << table.failures() << "\n"
           << "duration_seconds = " << detail::format_double(total_duration) << "\n";
  detail::write_file(outdir / "manifest.txt", manifest.str());
}

}  // namespace fairpoison
