#include "linbandit/estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace linbandit {

namespace {
void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace

OlsState OlsState::init(const std::vector<Eigen::VectorXd>& arms,
                        const std::vector<double>& rewards) {
  require(!arms.empty(), "ols_init: need at least one observation");
  require(arms.size() == rewards.size(), "ols_init: arms/rewards length mismatch");
  const Eigen::Index dim = arms.front().size();
  OlsState s;
  s.gram_ = Eigen::MatrixXd::Zero(dim, dim);
  s.response_ = Eigen::VectorXd::Zero(dim);
  for (std::size_t i = 0; i < arms.size(); ++i) {
    require(arms[i].size() == dim, "ols_init: inconsistent arm dimensions");
    require(std::isfinite(rewards[i]), "ols_init: non-finite reward");
    s.gram_.noalias() += arms[i] * arms[i].transpose();
    s.response_ += rewards[i] * arms[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.gram_);
  require(eig.info() == Eigen::Success, "ols_init: eigendecomposition failed");
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  require(lo > 0.0 && hi / lo <= 1e12, "ols_init: Gram matrix is singular");
  s.gram_inv_ = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                eig.eigenvectors().transpose();
  s.gram_inv_ = ((s.gram_inv_ + s.gram_inv_.transpose()) / 2.0).eval();
  s.estimate_ = s.gram_inv_ * s.response_;
  s.log_det_ = eig.eigenvalues().array().log().sum();
  s.count_ = std::int64_t(arms.size());
  return s;
}

void OlsState::update(const Eigen::VectorXd& arm, double reward) {
  require(arm.size() == dim(), "ols_update: arm has wrong dimension");
  require(std::isfinite(reward), "ols_update: non-finite reward");
  const Eigen::VectorXd w = gram_inv_ * arm;        // C_t u
  const double denom = 1.0 + arm.dot(w);            // 1 + ||u||_{C_t}^2
  gram_inv_.noalias() -= (w * w.transpose()) / denom;
  gram_.noalias() += arm * arm.transpose();
  log_det_ += std::log(denom);
  response_ += reward * arm;
  estimate_ = gram_inv_ * response_;
  ++count_;

#ifndef NDEBUG
  // drift guard: rank-one downdates against a fresh inverse every 2^10 steps
  if (++updates_since_check_ >= 1024) {
    updates_since_check_ = 0;
    const Eigen::MatrixXd direct = gram_.llt().solve(Eigen::MatrixXd::Identity(dim(), dim()));
    const double err = (direct - gram_inv_).norm() / std::max(1.0, direct.norm());
    if (err > 1e-8) throw std::runtime_error("ols_update: inverse drift beyond 1e-8");
  }
#endif
}

double OlsState::weighted_norm_sq(const Eigen::VectorXd& u) const {
  require(u.size() == dim(), "weighted_norm_sq: u has wrong dimension");
  double q = u.dot(gram_inv_ * u);
  if (q < 0.0) {
    require(q > -1e-12, "weighted_norm_sq: negative beyond round-off tolerance");
    q = 0.0;
  }
  return q;
}

UncertaintyParams UncertaintyParams::theoretical(double sigma0, double u_bar, double lambda0,
                                                 std::optional<std::int64_t> arm_count) {
  require(sigma0 >= 0.0, "uncertainty: sigma0 must be >= 0");
  require(u_bar > 0.0, "uncertainty: u_bar must be > 0");
  require(lambda0 > 0.0, "uncertainty: lambda0 must be > 0");
  if (arm_count) require(*arm_count >= 1, "uncertainty: arm count must be >= 1");
  UncertaintyParams p;
  p.sigma0 = sigma0;
  p.u_bar = u_bar;
  p.lambda0 = lambda0;
  p.kappa0 = 2.0 * std::sqrt(1.0 + std::log(1.0 + 36.0 * u_bar * u_bar / lambda0));
  p.alpha = 4.0 * sigma0 * p.kappa0 * p.kappa0;
  p.arm_count = arm_count;
  return p;
}

UncertaintyParams UncertaintyParams::with_alpha(double alpha_override) const {
  require(alpha_override > 0.0, "uncertainty: alpha override must be > 0");
  UncertaintyParams p = *this;
  p.alpha = alpha_override;
  p.alpha_overridden = true;
  return p;
}

double radius_scale(const UncertaintyParams& params, std::int64_t t, Eigen::Index dim) {
  require(t >= 2, "radius: t must be >= 2 so log t > 0");
  const double logt = std::log(double(t));
  double inner = double(dim) * logt;
  if (params.arm_count) inner = std::min(inner, double(*params.arm_count));
  return params.alpha * std::sqrt(logt) * std::sqrt(inner);
}

double uncertainty_radius(const OlsState& state, const UncertaintyParams& params,
                          const Eigen::VectorXd& u) {
  return radius_scale(params, state.count(), state.dim()) *
         std::sqrt(state.weighted_norm_sq(u));
}

GaussianPosterior GaussianPosterior::isotropic_prior(Eigen::Index dim) {
  require(dim >= 2, "posterior: dim must be >= 2");
  GaussianPosterior p;
  p.mean = Eigen::VectorXd::Zero(dim);
  p.covariance = Eigen::MatrixXd::Identity(dim, dim) / double(dim);
  return p;
}

void GaussianPosterior::update(const Eigen::VectorXd& arm, double reward, double noise_var) {
  require(noise_var > 0.0, "posterior: noise variance must be > 0");
  require(arm.size() == mean.size(), "posterior: arm has wrong dimension");
  require(std::isfinite(reward), "posterior: non-finite reward");
  const Eigen::VectorXd w = covariance * arm;
  const double denom = noise_var + arm.dot(w);
  mean += w * ((reward - arm.dot(mean)) / denom);
  covariance.noalias() -= (w * w.transpose()) / denom;
}

std::vector<DirectionalRisk> directional_risk_terms(const std::vector<Eigen::VectorXd>& arms,
                                                    const GaussianPosterior& posterior,
                                                    const Eigen::VectorXd& z) {
  const Eigen::Index dim = posterior.mean.size();
  require(z.size() == dim, "directional_risk: z has wrong dimension");
  for (const auto& a : arms)
    require(a.size() == dim, "directional_risk: arm has wrong dimension");

  // orthonormal directions orthogonal to the posterior mean
  Eigen::MatrixXd S(dim, dim - 1);
  if (posterior.mean.norm() < 1e-12) {
    S.setZero();
    for (Eigen::Index k = 0; k < dim - 1; ++k) S(k + 1, k) = 1.0;
  } else {
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(posterior.mean);
    const Eigen::MatrixXd full = qr.householderQ();
    S = full.rightCols(dim - 1);  // first column is +-mean/||mean||
  }

  std::vector<DirectionalRisk> out(std::size_t(dim - 1));
  for (Eigen::Index k = 0; k < dim - 1; ++k) {
    const Eigen::VectorXd s = S.col(k);
    DirectionalRisk d;
    for (const auto& a : arms) {
      const double proj = a.dot(s);
      d.exploration += proj * proj;
    }
    d.variance = s.dot(posterior.covariance * s);
    const double err = (z - posterior.mean).dot(s);
    d.sq_error = err * err;
    out[std::size_t(k)] = d;
  }
  return out;
}

}  // namespace linbandit
