#include "linbandit/environment.hpp"

#include <cmath>
#include <stdexcept>

namespace linbandit {

namespace {
void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace

NoiseModel NoiseModel::gaussian(double sigma) {
  require(sigma >= 0.0, "noise: sigma must be >= 0");
  return NoiseModel{Kind::kGaussian, sigma};
}

NoiseModel NoiseModel::uniform(double half_width) {
  require(half_width >= 0.0, "noise: half width must be >= 0");
  return NoiseModel{Kind::kUniform, half_width};
}

double NoiseModel::sample(Rng& rng) const {
  switch (kind) {
    case Kind::kGaussian:
      return param == 0.0 ? 0.0 : param * rng.normal();
    case Kind::kUniform:
      return param == 0.0 ? 0.0 : rng.uniform(-param, param);
  }
  return 0.0;
}

Prior Prior::gaussian_isotropic() { return Prior{Kind::kGaussianIsotropic, {}, 0.0, 0.0}; }

Prior Prior::fixed_point(Eigen::VectorXd z) {
  require(z.size() >= 2, "prior: fixed point must have dim >= 2");
  return Prior{Kind::kFixedPoint, std::move(z), 0.0, 0.0};
}

Prior Prior::iid_gaussian(double sigma) {
  require(sigma > 0.0, "prior: iid gaussian sigma must be > 0");
  return Prior{Kind::kIidGaussian, {}, sigma, 0.0};
}

Prior Prior::iid_uniform(double lo, double hi) {
  require(lo < hi, "prior: iid uniform needs lo < hi");
  return Prior{Kind::kIidUniform, {}, lo, hi};
}

Eigen::VectorXd Prior::sample(Eigen::Index dim, Rng& rng) const {
  switch (kind) {
    case Kind::kGaussianIsotropic: {
      Eigen::VectorXd z(dim);
      const double scale = 1.0 / std::sqrt(double(dim));
      for (Eigen::Index i = 0; i < dim; ++i) z(i) = scale * rng.normal();
      return z;
    }
    case Kind::kFixedPoint:
      require(point.size() == dim, "prior: fixed point has wrong dimension");
      return point;
    case Kind::kIidGaussian: {
      Eigen::VectorXd z(dim);
      for (Eigen::Index i = 0; i < dim; ++i) z(i) = a * rng.normal();
      return z;
    }
    case Kind::kIidUniform: {
      Eigen::VectorXd z(dim);
      for (Eigen::Index i = 0; i < dim; ++i) z(i) = rng.uniform(a, b);
      return z;
    }
  }
  return Eigen::VectorXd::Zero(dim);
}

Eigen::VectorXd sample_z(const Prior& prior, Eigen::Index dim, Rng& rng) {
  return prior.sample(dim, rng);
}

BanditInstance::BanditInstance(std::shared_ptr<const ArmSet> arms, Eigen::VectorXd z,
                               NoiseModel noise)
    : arms_(std::move(arms)), z_(std::move(z)), noise_(noise) {
  require(arms_ != nullptr, "instance: arm set is null");
  require(z_.size() == arms_->dim(), "instance: z has wrong dimension");
}

double BanditInstance::pull(const Eigen::VectorXd& arm, Rng& rng) const {
  if (!arms_->contains(arm))
    throw std::invalid_argument("pull: arm is not a member of the arm set");
  return arm.dot(z_) + noise_.sample(rng);
}

NormBandEstimate norm_band_probability(double theta, double beta, Eigen::Index dim,
                                       std::int64_t n_samples, Rng& rng) {
  require(theta > 0.0 && theta <= 0.5, "norm_band: need 0 < theta <= 1/2");
  require(beta > 0.5, "norm_band: need beta > 1/2");
  require(dim >= 2, "norm_band: dim must be >= 2");
  require(n_samples >= 2, "norm_band: need at least 2 samples");
  const Prior prior = Prior::gaussian_isotropic();
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const double n = prior.sample(dim, rng).norm();
    if (n >= theta && n <= beta) ++hits;
  }
  NormBandEstimate out;
  out.p_hat = double(hits) / double(n_samples);
  out.stderr_ = std::sqrt(out.p_hat * (1.0 - out.p_hat) / double(n_samples));
  out.bound = 1.0 - 4.0 * theta * theta - 1.0 / (beta * beta);
  return out;
}

}  // namespace linbandit
