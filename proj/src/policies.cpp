#include "linbandit/policies.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace linbandit {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_select(std::int64_t t, std::int64_t& step, bool& pending) {
  require(!pending, "policy: select called twice without observe");
  require(t == step + 1, "policy: select steps must be 1, 2, 3, ...");
  step = t;
  pending = true;
}

void check_observe(const Eigen::VectorXd& arm, const Eigen::VectorXd& last, bool& pending) {
  require(pending, "policy: observe without a preceding select");
  require(arm.size() == last.size() && (arm - last).lpNorm<Eigen::Infinity>() == 0.0,
          "policy: observed arm differs from the selected arm");
  pending = false;
}

std::vector<Eigen::VectorXd> candidate_arms(const ArmSet& set) {
  if (set.is_finite()) return set.points();
  if (set.is_polytope()) return set.extreme_points();
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------
// PEGE

std::int64_t PegePolicy::periods_after_cycles(Eigen::Index dim, std::int64_t cycles) {
  return std::int64_t(dim) * cycles + cycles * (cycles + 1) / 2;
}

void PegePolicy::reset(std::shared_ptr<const ArmSet> arms, const UncertaintyParams&,
                       std::uint64_t) {
  require(arms != nullptr, "pege: arm set is null");
  arms_ = std::move(arms);
  spanner_ = arms_->spanner();
  const Eigen::Index r = arms_->dim();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(r, r);
  for (const auto& b : spanner_.arms) gram.noalias() += b * b.transpose();
  basis_inv_ = gram.llt().solve(Eigen::MatrixXd::Identity(r, r));
  reward_sums_ = Eigen::VectorXd::Zero(r);
  greedy_arm_.resize(0);
  estimates_.clear();
  cycle_ = 1;
  explore_k_ = 0;
  exploit_left_ = 0;
  exploring_ = true;
  step_ = 0;
  pending_ = false;
}

Eigen::VectorXd PegePolicy::select(std::int64_t t) {
  require(arms_ != nullptr, "pege: select before reset");
  check_select(t, step_, pending_);
  last_arm_ = exploring_ ? spanner_.arms[std::size_t(explore_k_)] : greedy_arm_;
  return last_arm_;
}

void PegePolicy::observe(const Eigen::VectorXd& arm, double reward) {
  check_observe(arm, last_arm_, pending_);
  require(std::isfinite(reward), "pege: non-finite reward");
  if (exploring_) {
    reward_sums_(explore_k_) += reward;
    ++explore_k_;
    if (explore_k_ == arms_->dim()) {
      // estimate from exploration rewards only
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(arms_->dim());
      for (Eigen::Index k = 0; k < arms_->dim(); ++k)
        acc += spanner_.arms[std::size_t(k)] * reward_sums_(k);
      Eigen::VectorXd zhat = basis_inv_ * acc / double(cycle_);
      greedy_arm_ = arms_->best_arm(zhat);
      estimates_.emplace_back(cycle_, std::move(zhat));
      exploring_ = false;
      exploit_left_ = cycle_;
    }
  } else {
    if (--exploit_left_ == 0) {
      ++cycle_;
      explore_k_ = 0;
      exploring_ = true;
    }
  }
}

// ---------------------------------------------------------------------------
// Uncertainty-ellipsoid index policy

void UePolicy::reset(std::shared_ptr<const ArmSet> arms, const UncertaintyParams& params,
                     std::uint64_t) {
  require(arms != nullptr, "ue: arm set is null");
  arms_ = std::move(arms);
  params_ = params;
  spanner_ = arms_->spanner();
  candidates_ = candidate_arms(*arms_);
  params_.arm_count = candidates_.empty()
                          ? std::nullopt
                          : std::optional<std::int64_t>(std::int64_t(candidates_.size()));
  grid_.resize(0, 0);
  if (candidates_.empty() && arms_->dim() == 2) {
    // boundary grid for the near-exact r = 2 path
    constexpr Eigen::Index kGrid = 10000;
    grid_.resize(kGrid, 2);
    for (Eigen::Index i = 0; i < kGrid; ++i) {
      const double th = 2.0 * std::numbers::pi * double(i) / double(kGrid);
      grid_(i, 0) = std::cos(th);
      grid_(i, 1) = std::sin(th);
    }
    if (arms_->kind() == ArmSet::Kind::kEllipsoid) {
      // map the circle onto the ellipsoid boundary via Q^(1/2)
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(arms_->shape_matrix());
      const Eigen::MatrixXd sqrtq = eig.eigenvectors() *
                                    eig.eigenvalues().cwiseSqrt().asDiagonal() *
                                    eig.eigenvectors().transpose();
      grid_ = (grid_ * sqrtq).eval();
    }
  }
  init_arms_.clear();
  init_rewards_.clear();
  ols_.reset();
  info_ = {};
  step_ = 0;
  pending_ = false;
}

const OlsState& UePolicy::ols() const {
  require(ols_.has_value(), "ue: least-squares state not initialized yet");
  return *ols_;
}

Eigen::VectorXd UePolicy::maximize_index(double scale) const {
  const Eigen::VectorXd& zhat = ols_->estimate();
  const Eigen::MatrixXd& C = ols_->gram_inverse();

  if (!candidates_.empty()) {
    std::size_t best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      const double val =
          candidates_[i].dot(zhat) + scale * std::sqrt(ols_->weighted_norm_sq(candidates_[i]));
      if (val > best_val) {
        best = i;
        best_val = val;
      }
    }
    return candidates_[best];
  }

  // continuous set: maximize v'zhat + scale ||v||_C
  auto value = [&](const Eigen::VectorXd& v) {
    return v.dot(zhat) + scale * std::sqrt(std::max(0.0, v.dot(C * v)));
  };
  auto ascend = [&](Eigen::VectorXd v) {
    for (int it = 0; it < 200; ++it) {
      const double wn = std::sqrt(std::max(0.0, v.dot(C * v)));
      if (wn == 0.0) break;
      Eigen::VectorXd g = zhat + (scale / wn) * (C * v);
      Eigen::VectorXd next = arms_->best_arm(g);
      if ((next - v).lpNorm<Eigen::Infinity>() <= 1e-13) return next;
      v = std::move(next);
    }
    return v;
  };

  Eigen::VectorXd best;
  double best_val = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Eigen::VectorXd& start) {
    const Eigen::VectorXd v = ascend(arms_->best_arm(start));
    const double val = value(v);
    if (val > best_val) {
      best = v;
      best_val = val;
    }
  };

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
  for (Eigen::Index i = 0; i < C.cols(); ++i) {
    consider(eig.eigenvectors().col(i));
    consider(-eig.eigenvectors().col(i));
  }
  consider(zhat);
  consider(-zhat);

  if (grid_.rows() > 0) {
    const Eigen::VectorXd lin = grid_ * zhat;
    const Eigen::VectorXd quad = ((grid_ * C).cwiseProduct(grid_)).rowwise().sum();
    Eigen::Index gi = 0;
    (lin + scale * quad.cwiseMax(0.0).cwiseSqrt()).maxCoeff(&gi);
    consider(grid_.row(gi).transpose());
  }
  return best;
}

Eigen::VectorXd UePolicy::select(std::int64_t t) {
  require(arms_ != nullptr, "ue: select before reset");
  check_select(t, step_, pending_);
  const Eigen::Index r = arms_->dim();
  if (t <= std::int64_t(r)) {
    info_ = {};
    last_arm_ = spanner_.arms[std::size_t(t - 1)];
    return last_arm_;
  }
  const double scale = radius_scale(params_, ols_->count(), r);
  Eigen::VectorXd arm = maximize_index(scale);
  info_.weighted_norm_sq = ols_->weighted_norm_sq(arm);
  info_.radius = scale * std::sqrt(info_.weighted_norm_sq);
  last_arm_ = std::move(arm);
  return last_arm_;
}

void UePolicy::observe(const Eigen::VectorXd& arm, double reward) {
  check_observe(arm, last_arm_, pending_);
  if (!ols_.has_value()) {
    init_arms_.push_back(arm);
    init_rewards_.push_back(reward);
    if (init_arms_.size() == std::size_t(arms_->dim())) {
      ols_ = OlsState::init(init_arms_, init_rewards_);
      init_arms_.clear();
      init_rewards_.clear();
    }
    return;
  }
  ols_->update(arm, reward);
}

// ---------------------------------------------------------------------------
// Greedy baseline

void GreedyPolicy::reset(std::shared_ptr<const ArmSet> arms, const UncertaintyParams&,
                         std::uint64_t) {
  require(arms != nullptr, "greedy: arm set is null");
  arms_ = std::move(arms);
  spanner_ = arms_->spanner();
  init_arms_.clear();
  init_rewards_.clear();
  ols_.reset();
  step_ = 0;
  pending_ = false;
}

Eigen::VectorXd GreedyPolicy::select(std::int64_t t) {
  require(arms_ != nullptr, "greedy: select before reset");
  check_select(t, step_, pending_);
  if (t <= std::int64_t(arms_->dim()))
    last_arm_ = spanner_.arms[std::size_t(t - 1)];
  else
    last_arm_ = arms_->best_arm(ols_->estimate());
  return last_arm_;
}

void GreedyPolicy::observe(const Eigen::VectorXd& arm, double reward) {
  check_observe(arm, last_arm_, pending_);
  if (!ols_.has_value()) {
    init_arms_.push_back(arm);
    init_rewards_.push_back(reward);
    if (init_arms_.size() == std::size_t(arms_->dim())) {
      ols_ = OlsState::init(init_arms_, init_rewards_);
      init_arms_.clear();
      init_rewards_.clear();
    }
    return;
  }
  ols_->update(arm, reward);
}

// ---------------------------------------------------------------------------
// UCB1 baseline

void Ucb1Policy::reset(std::shared_ptr<const ArmSet> arms, const UncertaintyParams&,
                       std::uint64_t) {
  require(arms != nullptr, "ucb1: arm set is null");
  require(arms->is_finite(), "ucb1: requires a finite arm set");
  arms_ = std::move(arms);
  mean_reward_.assign(arms_->points().size(), 0.0);
  counts_.assign(arms_->points().size(), 0);
  step_ = 0;
  pending_ = false;
}

Eigen::VectorXd Ucb1Policy::select(std::int64_t t) {
  require(arms_ != nullptr, "ucb1: select before reset");
  check_select(t, step_, pending_);
  const auto& pts = arms_->points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (counts_[i] == 0) {
      last_index_ = i;
      return pts[i];
    }
  }
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double val =
        mean_reward_[i] + std::sqrt(2.0 * std::log(double(t)) / double(counts_[i]));
    if (val > best_val) {
      best = i;
      best_val = val;
    }
  }
  last_index_ = best;
  return pts[best];
}

void Ucb1Policy::observe(const Eigen::VectorXd& arm, double reward) {
  require(pending_, "policy: observe without a preceding select");
  const auto& chosen = arms_->points()[last_index_];
  require((arm - chosen).lpNorm<Eigen::Infinity>() == 0.0,
          "policy: observed arm differs from the selected arm");
  require(std::isfinite(reward), "ucb1: non-finite reward");
  pending_ = false;
  auto& n = counts_[last_index_];
  mean_reward_[last_index_] = (mean_reward_[last_index_] * double(n) + reward) / double(n + 1);
  ++n;
}

// ---------------------------------------------------------------------------
// Extreme-point reduction

ExtremePointPolicy::ExtremePointPolicy(std::unique_ptr<Policy> inner)
    : inner_(std::move(inner)) {
  require(inner_ != nullptr, "extreme: inner policy is null");
}

void ExtremePointPolicy::reset(std::shared_ptr<const ArmSet> arms,
                               const UncertaintyParams& params, std::uint64_t seed) {
  require(arms != nullptr, "extreme: arm set is null");
  require(arms->is_polytope(), "extreme: requires a polytope arm set");
  vertex_set_ = std::make_shared<const ArmSet>(arms->extreme_points_as_finite());
  UncertaintyParams p = UncertaintyParams::theoretical(
      params.sigma0, vertex_set_->max_norm(), vertex_set_->spanner().lambda0,
      std::int64_t(vertex_set_->points().size()));
  if (params.alpha_overridden) p = p.with_alpha(params.alpha);
  inner_->reset(vertex_set_, p, seed);
}

Eigen::VectorXd ExtremePointPolicy::select(std::int64_t t) {
  require(vertex_set_ != nullptr, "extreme: select before reset");
  return inner_->select(t);
}

void ExtremePointPolicy::observe(const Eigen::VectorXd& arm, double reward) {
  inner_->observe(arm, reward);
}

std::string ExtremePointPolicy::name() const { return "extreme+" + inner_->name(); }

std::unique_ptr<Policy> make_policy(const std::string& name) {
  if (name == "pege") return std::make_unique<PegePolicy>();
  if (name == "ue") return std::make_unique<UePolicy>();
  if (name == "greedy") return std::make_unique<GreedyPolicy>();
  if (name == "ucb1") return std::make_unique<Ucb1Policy>();
  if (name.rfind("extreme+", 0) == 0)
    return std::make_unique<ExtremePointPolicy>(make_policy(name.substr(8)));
  throw std::invalid_argument("unknown policy: " + name);
}

}  // namespace linbandit
