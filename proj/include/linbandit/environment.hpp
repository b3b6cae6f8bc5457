#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "linbandit/geometry.hpp"
#include "linbandit/rng.hpp"

namespace linbandit {

// Zero-mean reward noise with a sub-Gaussian scale sigma0: Gaussian(sigma)
// has sigma0 = sigma, Uniform on [-a, a] has sigma0 = a (bounded support).
// sigma = 0 is the degenerate noise-free case used by exact-recovery tests.
struct NoiseModel {
  enum class Kind { kGaussian, kUniform };

  static NoiseModel gaussian(double sigma);
  static NoiseModel uniform(double half_width);

  double sigma0() const { return param; }
  double sample(Rng& rng) const;

  Kind kind = Kind::kGaussian;
  double param = 1.0;
};

// Distribution of the unknown parameter Z.
struct Prior {
  enum class Kind { kGaussianIsotropic, kFixedPoint, kIidGaussian, kIidUniform };

  static Prior gaussian_isotropic();                 // N(0, I/r)
  static Prior fixed_point(Eigen::VectorXd z);
  static Prior iid_gaussian(double sigma);           // coords N(0, sigma^2)
  static Prior iid_uniform(double lo, double hi);

  Eigen::VectorXd sample(Eigen::Index dim, Rng& rng) const;

  Kind kind = Kind::kGaussianIsotropic;
  Eigen::VectorXd point;
  double a = 0.0;
  double b = 1.0;
};

Eigen::VectorXd sample_z(const Prior& prior, Eigen::Index dim, Rng& rng);

// One bandit environment: reward of playing u is u'z + noise.
class BanditInstance {
 public:
  BanditInstance(std::shared_ptr<const ArmSet> arms, Eigen::VectorXd z, NoiseModel noise);

  double pull(const Eigen::VectorXd& arm, Rng& rng) const;

  const ArmSet& arms() const { return *arms_; }
  std::shared_ptr<const ArmSet> arms_ptr() const { return arms_; }
  const Eigen::VectorXd& z() const { return z_; }
  const NoiseModel& noise() const { return noise_; }

 private:
  std::shared_ptr<const ArmSet> arms_;
  Eigen::VectorXd z_;
  NoiseModel noise_;
};

struct TrajectoryStep {
  Eigen::VectorXd arm;
  double reward = 0.0;
  double instant_regret = 0.0;
  // index-policy diagnostics; NaN when the policy does not maintain them
  double weighted_norm_sq = std::numeric_limits<double>::quiet_NaN();
  double radius = std::numeric_limits<double>::quiet_NaN();
};

struct TrajectoryRecord {
  std::uint64_t replication = 0;
  Eigen::VectorXd z;
  std::vector<TrajectoryStep> steps;
  std::vector<std::int64_t> checkpoints;
  std::vector<double> cumulative_regret;  // aligned with checkpoints

  // phased-estimator diagnostics: (cycle, ||estimate - z||^2) per completed
  // exploration phase; empty for policies without phases
  std::vector<std::pair<std::int64_t, double>> cycle_estimate_error_sq;

  // index-policy runtime invariants, counted by the harness
  std::int64_t step_norm_violations = 0;
  std::int64_t budget_violations = 0;
};

struct NormBandEstimate {
  double p_hat = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;  // 1 - 4 theta^2 - 1/beta^2
};

// Monte Carlo estimate of Pr{theta <= ||Z|| <= beta} under the isotropic
// N(0, I/r) prior; requires 0 < theta <= 1/2 < beta.
NormBandEstimate norm_band_probability(double theta, double beta, Eigen::Index dim,
                                       std::int64_t n_samples, Rng& rng);

}  // namespace linbandit
