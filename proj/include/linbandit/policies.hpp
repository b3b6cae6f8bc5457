#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "linbandit/estimation.hpp"
#include "linbandit/geometry.hpp"

namespace linbandit {

struct StepInfo {
  double weighted_norm_sq = std::numeric_limits<double>::quiet_NaN();
  double radius = std::numeric_limits<double>::quiet_NaN();
};

// Sequential decision protocol: reset once, then strictly alternating
// select(1), observe, select(2), observe, ...
class Policy {
 public:
  virtual ~Policy() = default;

  virtual void reset(std::shared_ptr<const ArmSet> arms, const UncertaintyParams& params,
                     std::uint64_t seed) = 0;
  virtual Eigen::VectorXd select(std::int64_t t) = 0;
  virtual void observe(const Eigen::VectorXd& arm, double reward) = 0;
  virtual std::string name() const = 0;

  // diagnostics for the step chosen by the last select(); NaN if untracked
  virtual StepInfo last_step_info() const { return {}; }
};

// Phased exploration, greedy exploitation: cycle c plays the r spanner arms
// once, re-estimates z from exploration rewards only, then commits to the
// greedy arm for c steps.
class PegePolicy : public Policy {
 public:
  void reset(std::shared_ptr<const ArmSet> arms, const UncertaintyParams& params,
             std::uint64_t seed) override;
  Eigen::VectorXd select(std::int64_t t) override;
  void observe(const Eigen::VectorXd& arm, double reward) override;
  std::string name() const override { return "pege"; }

  std::int64_t cycle() const { return cycle_; }
  bool has_estimate() const { return !estimates_.empty(); }
  const std::vector<std::pair<std::int64_t, Eigen::VectorXd>>& estimate_history() const {
    return estimates_;
  }

  // total periods after K full cycles: r K + K (K + 1) / 2
  static std::int64_t periods_after_cycles(Eigen::Index dim, std::int64_t cycles);

 private:
  std::shared_ptr<const ArmSet> arms_;
  SpannerArms spanner_;
  Eigen::MatrixXd basis_inv_;  // (sum_k b_k b_k')^-1
  Eigen::VectorXd reward_sums_;
  Eigen::VectorXd greedy_arm_;
  std::vector<std::pair<std::int64_t, Eigen::VectorXd>> estimates_;
  std::int64_t cycle_ = 1;
  Eigen::Index explore_k_ = 0;
  std::int64_t exploit_left_ = 0;
  bool exploring_ = true;
  std::int64_t step_ = 0;
  bool pending_ = false;
  Eigen::VectorXd last_arm_;
};

// Index policy: after playing the spanner once, pick
// argmax_v v' zhat_{t-1} + R_{t-1}^v with R per the confidence-radius
// formula. Finite sets (and polytope vertices) are maximized exactly; on the
// sphere/ellipsoid a multi-start fixed-point ascent is used, backed by a
// 10^4-point boundary grid at r = 2.
class UePolicy : public Policy {
 public:
  void reset(std::shared_ptr<const ArmSet> arms, const UncertaintyParams& params,
             std::uint64_t seed) override;
  Eigen::VectorXd select(std::int64_t t) override;
  void observe(const Eigen::VectorXd& arm, double reward) override;
  std::string name() const override { return "ue"; }
  StepInfo last_step_info() const override { return info_; }

  bool initialized() const { return ols_.has_value(); }
  const OlsState& ols() const;
  const UncertaintyParams& params() const { return params_; }

 private:
  Eigen::VectorXd maximize_index(double scale) const;

  std::shared_ptr<const ArmSet> arms_;
  UncertaintyParams params_;
  SpannerArms spanner_;
  std::vector<Eigen::VectorXd> candidates_;  // finite/polytope arm list
  Eigen::MatrixXd grid_;                     // r = 2 boundary grid rows
  std::vector<Eigen::VectorXd> init_arms_;
  std::vector<double> init_rewards_;
  std::optional<OlsState> ols_;
  StepInfo info_;
  std::int64_t step_ = 0;
  bool pending_ = false;
  Eigen::VectorXd last_arm_;
};

// Certainty-equivalence baseline: spanner init, then always the greedy arm
// under the running least-squares estimate (every reward enters the fit).
class GreedyPolicy : public Policy {
 public:
  void reset(std::shared_ptr<const ArmSet> arms, const UncertaintyParams& params,
             std::uint64_t seed) override;
  Eigen::VectorXd select(std::int64_t t) override;
  void observe(const Eigen::VectorXd& arm, double reward) override;
  std::string name() const override { return "greedy"; }

 private:
  std::shared_ptr<const ArmSet> arms_;
  SpannerArms spanner_;
  std::vector<Eigen::VectorXd> init_arms_;
  std::vector<double> init_rewards_;
  std::optional<OlsState> ols_;
  std::int64_t step_ = 0;
  bool pending_ = false;
  Eigen::VectorXd last_arm_;
};

// Classic finite-arm baseline ignoring the linear structure; unpulled arms
// first (lowest index), then argmax of mean + sqrt(2 log t / n_u).
class Ucb1Policy : public Policy {
 public:
  void reset(std::shared_ptr<const ArmSet> arms, const UncertaintyParams& params,
             std::uint64_t seed) override;
  Eigen::VectorXd select(std::int64_t t) override;
  void observe(const Eigen::VectorXd& arm, double reward) override;
  std::string name() const override { return "ucb1"; }

  const std::vector<std::int64_t>& pull_counts() const { return counts_; }

 private:
  std::shared_ptr<const ArmSet> arms_;
  std::vector<double> mean_reward_;
  std::vector<std::int64_t> counts_;
  std::size_t last_index_ = 0;
  std::int64_t step_ = 0;
  bool pending_ = false;
};

// Reduces a polytope to its extreme points and delegates to a finite-arm
// policy; radius constants are recomputed for the vertex list.
class ExtremePointPolicy : public Policy {
 public:
  explicit ExtremePointPolicy(std::unique_ptr<Policy> inner);

  void reset(std::shared_ptr<const ArmSet> arms, const UncertaintyParams& params,
             std::uint64_t seed) override;
  Eigen::VectorXd select(std::int64_t t) override;
  void observe(const Eigen::VectorXd& arm, double reward) override;
  std::string name() const override;
  StepInfo last_step_info() const override { return inner_->last_step_info(); }

  const Policy& inner() const { return *inner_; }

 private:
  std::unique_ptr<Policy> inner_;
  std::shared_ptr<const ArmSet> vertex_set_;
};

// "pege", "ue", "greedy", "ucb1", or "extreme+<finite-policy>"
std::unique_ptr<Policy> make_policy(const std::string& name);

}  // namespace linbandit
