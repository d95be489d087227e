// Command-line harness: run attack sweeps over epsilon/lambda grids, run a
// single cell, or pretty-print an existing results.json.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fairpoison/fairpoison.hpp"

namespace fp = fairpoison;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitPartialFailure = 2;

struct CommonOpts {
  std::string config_path;
  std::string data_path;
  std::string schema_path;
  std::string out_dir;
  bool synthetic = false;
};

fp::ExperimentConfig build_config(const CommonOpts& o) {
  fp::ExperimentConfig cfg;
  if (!o.config_path.empty())
    cfg = fp::parse_experiment_config(fp::detail::read_file(o.config_path));
  if (!o.data_path.empty()) cfg.data_path = o.data_path;
  if (!o.schema_path.empty()) cfg.schema_path = o.schema_path;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.synthetic) cfg.use_synthetic = true;
  if (!cfg.use_synthetic && cfg.data_path.empty())
    throw fp::ConfigError("no input: pass --data/--schema, --synthetic, or a --config with them");
  if (!cfg.use_synthetic && cfg.schema_path.empty())
    throw fp::ConfigError("--data requires --schema");
  return cfg;
}

void print_cell_line(const fp::CellResult& c) {
  std::printf("%-7s eps=%-5g", c.attack.c_str(), c.epsilon);
  if (c.lambda)
    std::printf(" lambda=%-5g", *c.lambda);
  else
    std::printf("             ");
  if (!c.ok) {
    std::printf("  FAILED: %s\n", c.error.c_str());
    return;
  }
  std::printf("  spd %.4f -> %.4f   eod %.4f -> %.4f   err %.4f -> %.4f   iters=%zu%s\n",
              c.before.spd, c.after.spd, c.before.eod, c.after.eod, c.before.test_error,
              c.after.test_error, c.attack_result.iterations_run,
              c.attack_result.converged ? "" : " (hit cap)");
}

int cmd_run(const CommonOpts& opts, int jobs) {
  const fp::ExperimentConfig cfg = build_config(opts);
  const fp::ResultsTable table = fp::sweep(cfg, jobs);
  fp::emit_results(table, cfg.out_dir);
  for (const auto& c : table.cells) print_cell_line(c);
  std::printf("wrote %s/{results.json,spd.csv,eod.csv,test_error.csv,manifest.txt}\n",
              cfg.out_dir.c_str());
  if (table.failures() > 0) {
    std::fprintf(stderr, "%zu of %zu cells failed; details in results.json\n", table.failures(),
                 table.cells.size());
    return kExitPartialFailure;
  }
  return kExitOk;
}

int cmd_cell(const CommonOpts& opts, const std::string& attack, double epsilon,
             std::optional<double> lambda, std::optional<std::uint64_t> seed, int jobs) {
  (void)jobs;
  fp::ExperimentConfig cfg = build_config(opts);
  if (seed) cfg.master_seed = *seed;
  const fp::CellResult cell = fp::run_cell(cfg, attack, epsilon, lambda);
  print_cell_line(cell);
  if (!opts.out_dir.empty()) {
    fp::ResultsTable table;
    table.config = cfg;
    table.cells.push_back(cell);
    fp::emit_results(table, cfg.out_dir);
    std::printf("wrote %s/results.json\n", cfg.out_dir.c_str());
  }
  return cell.ok ? kExitOk : kExitPartialFailure;
}

int cmd_inspect(const std::string& path) {
  const std::string text = fp::detail::read_file(path);
  const auto j = nlohmann::json::parse(text);
  std::printf("%s\n", j.value("tool", std::string("?")).c_str());
  const auto& cfg = j.at("config");
  std::printf("input: %s\n", cfg.value("synthetic", false)
                                 ? "built-in synthetic"
                                 : cfg.value("data", std::string("?")).c_str());
  std::printf("seed: %llu   cells: %zu\n",
              static_cast<unsigned long long>(cfg.value("seed", 0ULL)), j.at("cells").size());
  std::printf("%-7s %-7s %-7s %-6s %9s %9s %9s %9s %9s %9s\n", "attack", "eps", "lambda", "ok",
              "spd0", "spd1", "eod0", "eod1", "err0", "err1");
  for (const auto& c : j.at("cells")) {
    const bool ok = c.value("ok", false);
    std::string lam = c.at("lambda").is_null() ? "-" : fp::detail::format_double(c.at("lambda").get<double>());
    if (!ok) {
      std::printf("%-7s %-7g %-7s %-6s failed: %s\n", c.value("attack", std::string()).c_str(),
                  c.value("epsilon", 0.0), lam.c_str(), "no",
                  c.value("error", std::string()).c_str());
      continue;
    }
    const auto& b = c.at("before");
    const auto& a = c.at("after");
    std::printf("%-7s %-7g %-7s %-6s %9.4f %9.4f %9.4f %9.4f %9.4f %9.4f\n",
                c.value("attack", std::string()).c_str(), c.value("epsilon", 0.0), lam.c_str(),
                "yes", b.value("spd", 0.0), a.value("spd", 0.0), b.value("eod", 0.0),
                a.value("eod", 0.0), b.value("test_error", 0.0), a.value("test_error", 0.0));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"data poisoning attacks against the fairness of linear margin classifiers"};
  app.require_subcommand(1);

  CommonOpts opts;
  int jobs = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "experiment config file");
    cmd->add_option("--data", opts.data_path, "input CSV");
    cmd->add_option("--schema", opts.schema_path, "dataset schema config");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_flag("--synthetic", opts.synthetic, "use the built-in synthetic generator spec");
  };

  CLI::App* run = app.add_subcommand("run", "run a full sweep");
  add_common(run);
  run->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);

  CLI::App* cell = app.add_subcommand("cell", "run a single (attack, epsilon[, lambda]) cell");
  add_common(cell);
  std::string attack;
  double epsilon = 0.1;
  double lambda_val = 0.0;
  std::uint64_t seed_val = 0;
  cell->add_option("--attack", attack, "iaf | koh | solans | raa | nraa")->required();
  cell->add_option("--epsilon", epsilon, "poison fraction")->required();
  CLI::Option* lambda_opt = cell->add_option("--lambda", lambda_val, "fairness weight (iaf)");
  CLI::Option* seed_opt = cell->add_option("--seed", seed_val, "master seed override");

  CLI::App* inspect = app.add_subcommand("inspect", "pretty-print a results.json");
  std::string inspect_path;
  inspect->add_option("file", inspect_path, "path to results.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(opts, jobs);
    if (cell->parsed()) {
      std::optional<double> lambda;
      if (lambda_opt->count() > 0) lambda = lambda_val;
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = seed_val;
      return cmd_cell(opts, attack, epsilon, lambda, seed, jobs);
    }
    if (inspect->parsed()) return cmd_inspect(inspect_path);
  } catch (const fp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const fp::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "json error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  }
  return kExitOk;
}
