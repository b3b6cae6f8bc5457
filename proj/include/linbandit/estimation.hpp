#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace linbandit {

// Ordinary least squares over played arms, maintained incrementally.
// gram_inverse is C_t = (sum_s U_s U_s')^-1, kept symmetric by rank-one
// downdates; log_det_gram tracks log det(sum U U') via the determinant
// recursion det_{t+1} = det_t (1 + ||U_{t+1}||_{C_t}^2).
class OlsState {
 public:
  static OlsState init(const std::vector<Eigen::VectorXd>& arms,
                       const std::vector<double>& rewards);

  void update(const Eigen::VectorXd& arm, double reward);

  std::int64_t count() const { return count_; }
  Eigen::Index dim() const { return gram_inv_.rows(); }
  const Eigen::MatrixXd& gram_inverse() const { return gram_inv_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& response_acc() const { return response_; }
  const Eigen::VectorXd& estimate() const { return estimate_; }
  double log_det_gram() const { return log_det_; }

  // u' C_t u; tiny negative round-off (> -1e-12) clamps to 0
  double weighted_norm_sq(const Eigen::VectorXd& u) const;

 private:
  OlsState() = default;

  Eigen::MatrixXd gram_;
  Eigen::MatrixXd gram_inv_;
  Eigen::VectorXd response_;
  Eigen::VectorXd estimate_;
  double log_det_ = 0.0;
  std::int64_t count_ = 0;
  std::int64_t updates_since_check_ = 0;
};

// Confidence-radius constants. kappa0 = 2 sqrt(1 + log(1 + 36 ubar^2/lambda0))
// and the theoretical alpha = 4 sigma0 kappa0^2; alpha may be overridden
// (the theoretical value is extremely conservative at small horizons).
struct UncertaintyParams {
  double sigma0 = 1.0;
  double u_bar = 1.0;
  double lambda0 = 1.0;
  double kappa0 = 0.0;
  double alpha = 0.0;
  bool alpha_overridden = false;
  std::optional<std::int64_t> arm_count;  // nullopt = infinite arm set

  static UncertaintyParams theoretical(double sigma0, double u_bar, double lambda0,
                                       std::optional<std::int64_t> arm_count);
  UncertaintyParams with_alpha(double alpha_override) const;
};

// alpha sqrt(log t) sqrt(min{r log t, |U|}); the |U| branch never engages for
// infinite arm sets
double radius_scale(const UncertaintyParams& params, std::int64_t t, Eigen::Index dim);

// R_t^u = radius_scale * ||u||_{C_t}; requires state.count() >= 2 so log t > 0
double uncertainty_radius(const OlsState& state, const UncertaintyParams& params,
                          const Eigen::VectorXd& u);

// Conjugate Gaussian belief over z with known noise variance.
struct GaussianPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  static GaussianPosterior isotropic_prior(Eigen::Index dim);  // N(0, I/r)

  void update(const Eigen::VectorXd& arm, double reward, double noise_var);
};

// Per-direction terms of the lower-bound decomposition, for an orthonormal
// basis S^1..S^{r-1} orthogonal to the posterior mean (standard basis minus
// e1 when the mean is degenerate):
//   exploration = sum_t (U_t' S^k)^2
//   variance    = S^k' Cov S^k
//   sq_error    = ((z - mean)' S^k)^2
struct DirectionalRisk {
  double exploration = 0.0;
  double variance = 0.0;
  double sq_error = 0.0;
};

std::vector<DirectionalRisk> directional_risk_terms(const std::vector<Eigen::VectorXd>& arms,
                                                    const GaussianPosterior& posterior,
                                                    const Eigen::VectorXd& z);

}  // namespace linbandit
