#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "linbandit/environment.hpp"
#include "linbandit/estimation.hpp"
#include "linbandit/geometry.hpp"
#include "linbandit/policies.hpp"

namespace linbandit {

// Declarative arm-set description so configs round-trip exactly.
struct ArmSetSpec {
  std::string kind = "sphere";  // sphere|ellipsoid|finite|polytope|simplex|hypercube
  Eigen::Index dim = 2;
  Eigen::MatrixXd shape;                  // ellipsoid
  std::vector<Eigen::VectorXd> vectors;   // finite arms / polytope vertices

  ArmSet build() const;
  static ArmSetSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct PriorSpec {
  std::string kind = "gaussian_isotropic";  // |fixed|iid_gaussian|iid_uniform
  Eigen::VectorXd point;
  double a = 1.0;
  double b = 1.0;

  Prior build() const;
  static PriorSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct NoiseSpec {
  std::string kind = "gaussian";  // |uniform
  double param = 1.0;

  NoiseModel build() const;
  static NoiseSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct PolicySpec {
  std::string name = "pege";
  std::optional<double> alpha_override;

  static PolicySpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ExperimentConfig {
  std::string experiment_id = "experiment";
  ArmSetSpec arm_set;
  PriorSpec prior;
  NoiseSpec noise;
  PolicySpec policy;
  std::int64_t horizon = 256;
  std::vector<std::int64_t> checkpoints;  // empty = powers of two plus horizon
  std::int64_t replications = 100;
  std::uint64_t base_seed = 1;
  std::string output;  // optional path stem for CSV/summary

  void validate() const;
  std::vector<std::int64_t> checkpoint_grid() const;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static ExperimentConfig load(const std::string& path);
};

std::vector<std::int64_t> default_checkpoints(std::int64_t horizon);

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double ci95_half = 0.0;
  double intercept = 0.0;
};

// least-squares fit of log(value) against log(t); needs >= 4 positive points
SlopeFit fit_scaling(const std::vector<std::int64_t>& ts, const std::vector<double>& values);

struct CheckpointStat {
  std::int64_t t = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double ci95_half = 0.0;
};

struct SummaryStats {
  std::string policy;
  Eigen::Index dim = 0;
  std::int64_t replications = 0;
  std::vector<CheckpointStat> checkpoints;
  std::optional<SlopeFit> slope;  // absent when < 4 checkpoints or zero means
  std::int64_t step_norm_violations = 0;
  std::int64_t budget_violations = 0;
};

// per-replication cumulative regret at each checkpoint, in replication order
struct RegretTable {
  std::vector<std::int64_t> checkpoints;
  std::vector<std::vector<double>> rows;
  std::vector<TrajectoryRecord> records;  // populated only when keep_records
  // invariant counters, accumulated whether or not records are kept
  std::int64_t step_norm_violations = 0;
  std::int64_t budget_violations = 0;
};

UncertaintyParams derive_uncertainty_params(const ArmSet& set, double sigma0,
                                            std::optional<double> alpha_override);

TrajectoryRecord run_trajectory(const ExperimentConfig& config, const Eigen::VectorXd& z,
                                std::uint64_t replication);

RegretTable collect_regret(const ExperimentConfig& config,
                           const std::optional<Eigen::VectorXd>& fixed_z,
                           bool keep_records = false);

// conditional regret at a pinned z
SummaryStats estimate_regret(const ExperimentConfig& config, const Eigen::VectorXd& z);
// Bayes risk: fresh prior draw per replication
SummaryStats estimate_bayes_risk(const ExperimentConfig& config);

SummaryStats summarize(const ExperimentConfig& config, const RegretTable& table);

void write_regret_csv(std::ostream& out, const ExperimentConfig& config,
                      const RegretTable& table);
void write_summary(std::ostream& out, const SummaryStats& stats);

// reads a CSV produced by write_regret_csv and recomputes the summary per
// (policy, r) group
std::vector<SummaryStats> summarize_csv(std::istream& in);

// worker count: LINBANDIT_WORKERS env var, else hardware concurrency
int worker_count();
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body);

struct SweepSpec {
  ExperimentConfig base;
  std::vector<Eigen::Index> dims;
  std::vector<std::int64_t> horizons;
  std::vector<PolicySpec> policies;

  static SweepSpec from_json(const nlohmann::json& j);
  static SweepSpec load(const std::string& path);
  std::vector<ExperimentConfig> expand() const;
};

}  // namespace linbandit
