#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "linbandit/harness.hpp"
#include "linbandit/verify.hpp"

namespace {

using namespace linbandit;

struct Overrides {
  std::optional<std::string> experiment_id, arm_set, policy, prior, noise, output;
  std::optional<std::int64_t> horizon, replications, dim;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha, noise_param;
  std::vector<std::int64_t> checkpoints;
};

void add_override_flags(CLI::App& app, Overrides& ov) {
  app.add_option("--experiment-id", ov.experiment_id, "experiment id (names RNG streams)");
  app.add_option("--arm-set", ov.arm_set, "sphere|simplex|hypercube (resizable kinds only)");
  app.add_option("--policy", ov.policy, "pege|ue|greedy|ucb1|extreme+<name>");
  app.add_option("--alpha", ov.alpha, "override the confidence-radius multiplier");
  app.add_option("--prior", ov.prior, "gaussian_isotropic|iid_gaussian|iid_uniform");
  app.add_option("--noise", ov.noise, "gaussian|uniform");
  app.add_option("--noise-param", ov.noise_param, "noise sigma (gaussian) or half width (uniform)");
  app.add_option("-T,--horizon", ov.horizon, "number of periods");
  app.add_option("-n,--replications", ov.replications, "independent replications");
  app.add_option("-r,--dim", ov.dim, "ambient dimension");
  app.add_option("--seed", ov.seed, "base seed");
  app.add_option("--checkpoints", ov.checkpoints, "regret checkpoints")->delimiter(',');
  app.add_option("-o,--output", ov.output, "output path stem for the CSV and summary");
}

void apply(const Overrides& ov, ExperimentConfig& cfg) {
  if (ov.experiment_id) cfg.experiment_id = *ov.experiment_id;
  if (ov.arm_set) cfg.arm_set.kind = *ov.arm_set;
  if (ov.policy) cfg.policy.name = *ov.policy;
  if (ov.alpha) cfg.policy.alpha_override = *ov.alpha;
  if (ov.prior) cfg.prior.kind = *ov.prior;
  if (ov.noise) cfg.noise.kind = *ov.noise;
  if (ov.noise_param) cfg.noise.param = *ov.noise_param;
  if (ov.horizon) cfg.horizon = *ov.horizon;
  if (ov.replications) cfg.replications = *ov.replications;
  if (ov.dim) cfg.arm_set.dim = *ov.dim;
  if (ov.seed) cfg.base_seed = *ov.seed;
  if (!ov.checkpoints.empty()) cfg.checkpoints = ov.checkpoints;
  if (ov.output) cfg.output = *ov.output;
}

// writes <stem>.csv and <stem>.summary.txt; the stem falls back to the
// experiment id, resolved inside out_dir unless it is already a path
std::filesystem::path output_stem(const ExperimentConfig& cfg, const std::string& out_dir) {
  std::filesystem::path stem = cfg.output.empty() ? cfg.experiment_id : cfg.output;
  if (stem.is_relative()) stem = std::filesystem::path(out_dir) / stem;
  return stem;
}

void run_one(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& echo) {
  cfg.validate();
  const RegretTable table = collect_regret(cfg, std::nullopt, false);
  const SummaryStats stats = summarize(cfg, table);

  const std::filesystem::path stem = output_stem(cfg, out_dir);
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  std::ofstream csv(stem.string() + ".csv");
  if (!csv) throw std::runtime_error("cannot open for writing: " + stem.string() + ".csv");
  write_regret_csv(csv, cfg, table);
  std::ofstream summary(stem.string() + ".summary.txt");
  write_summary(summary, stats);

  echo << "experiment_id=" << cfg.experiment_id << '\n';
  write_summary(echo, stats);
  echo << "csv=" << stem.string() << ".csv" << '\n';
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
  const auto results = run_verify_suite(suite, seed);
  int failures = 0;
  for (const auto& res : results) {
    if (!res.pass) ++failures;
    std::printf("[%s] %-50s measured=%- 14.6g bound=%- 14.6g %s\n",
                res.pass ? "PASS" : "FAIL", res.name.c_str(), res.measured, res.bound,
                res.note.c_str());
  }
  std::printf("%zu checks, %d failures\n", results.size(), failures);
  return failures == 0 ? 0 : 1;
}

int cmd_report(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) {
    std::cerr << "cannot open: " << csv_path << '\n';
    return 1;
  }
  const auto groups = summarize_csv(in);
  bool first = true;
  for (const auto& stats : groups) {
    if (!first) std::cout << '\n';
    first = false;
    write_summary(std::cout, stats);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linearly parameterized bandit experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", suite = "all", csv_path;
  std::uint64_t verify_seed = 1;
  Overrides ov;

  CLI::App* run = app.add_subcommand("run", "run one experiment and write CSV + summary");
  run->add_option("-c,--config", config_path, "JSON experiment config")
      ->check(CLI::ExistingFile);
  run->add_option("--output-dir", out_dir, "directory for outputs");
  add_override_flags(*run, ov);

  CLI::App* sweep = app.add_subcommand("sweep", "expand a sweep config and run every cell");
  sweep->add_option("-c,--config", config_path, "JSON sweep config")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--output-dir", out_dir, "directory for outputs");
  add_override_flags(*sweep, ov);

  CLI::App* verify = app.add_subcommand("verify", "run the invariant check battery");
  verify->add_option("-s,--suite", suite, "geometry|environment|estimation|policies|all");
  verify->add_option("--seed", verify_seed, "seed for the checks");

  CLI::App* report = app.add_subcommand("report", "recompute a summary from a regret CSV");
  report->add_option("csv", csv_path, "CSV produced by run/sweep")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentConfig cfg;
      if (!config_path.empty()) cfg = ExperimentConfig::load(config_path);
      apply(ov, cfg);
      run_one(cfg, out_dir, std::cout);
      return 0;
    }
    if (sweep->parsed()) {
      // grid axes (and the outputs derived from them) live in the config
      if (ov.experiment_id || ov.arm_set || ov.policy || ov.horizon || ov.dim || ov.output) {
        std::cerr << "error: sweep: set grid axes in the config, not with flags\n";
        return 1;
      }
      const SweepSpec spec = SweepSpec::load(config_path);
      const auto cells = spec.expand();
      std::printf("sweep: %zu cells, %d workers\n", cells.size(), worker_count());
      for (ExperimentConfig cfg : cells) {
        apply(ov, cfg);
        run_one(cfg, out_dir, std::cout);
      }
      return 0;
    }
    if (verify->parsed()) return cmd_verify(suite, verify_seed);
    if (report->parsed()) return cmd_report(csv_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
