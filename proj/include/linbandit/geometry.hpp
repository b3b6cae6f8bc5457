#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linbandit/rng.hpp"

namespace linbandit {

// Exploration basis b_1..b_r together with the smallest eigenvalue of
// sum_k b_k b_k'. Policies rely on lambda0 > 0.
struct SpannerArms {
  std::vector<Eigen::VectorXd> arms;
  double lambda0 = 0.0;
};

struct SbarCheckResult {
  bool pass = false;
  double worst_ratio = 0.0;
  std::int64_t pairs_checked = 0;
};

// Compact arm set. One of:
//   sphere     {u : ||u|| = 1}
//   ellipsoid  {u : u' Q^-1 u <= 1}, Q symmetric positive definite
//   finite     explicit arm list
//   polytope   convex hull of extreme points; simplex(r) is the l1 ball
//              (2r vertices +-e_i), hypercube(r) is the linf ball (2^r sign
//              vertices, materialized only on demand)
class ArmSet {
 public:
  enum class Kind { kSphere, kEllipsoid, kFinite, kPolytope };
  enum class PolytopeForm { kVertexList, kSimplex, kHypercube };

  static ArmSet sphere(Eigen::Index dim);
  static ArmSet ellipsoid(const Eigen::MatrixXd& shape);
  static ArmSet finite(std::vector<Eigen::VectorXd> arms);
  static ArmSet polytope(std::vector<Eigen::VectorXd> vertices);
  static ArmSet simplex(Eigen::Index dim);
  static ArmSet hypercube(Eigen::Index dim);

  Kind kind() const { return kind_; }
  PolytopeForm polytope_form() const { return poly_form_; }
  Eigen::Index dim() const { return dim_; }
  bool is_finite() const { return kind_ == Kind::kFinite; }
  bool is_polytope() const { return kind_ == Kind::kPolytope; }

  // largest arm norm (sphere: 1, ellipsoid: sqrt(lambda_max(Q)),
  // finite/polytope: max over stored or implied vertices)
  double max_norm() const;

  // membership with absolute tolerance on the defining form / vertex match
  bool contains(const Eigen::VectorXd& u, double tol = 1e-9) const;

  // argmax_{u in set} u'z. Ties and z = 0 resolve deterministically:
  // sphere -> e1, ellipsoid -> Q e1 / sqrt(e1' Q e1), finite/polytope ->
  // lowest stored index.
  Eigen::VectorXd best_arm(const Eigen::VectorXd& z) const;
  double max_reward(const Eigen::VectorXd& z) const;

  // instantaneous regret of playing u at parameter z; throws if u is not a
  // member
  double gap(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const;

  SpannerArms spanner() const;

  // polytope only; hypercube refuses dim > 20 (2^dim vertices)
  std::vector<Eigen::VectorXd> extreme_points() const;
  ArmSet extreme_points_as_finite() const;

  const std::vector<Eigen::VectorXd>& points() const;      // finite/vertex list
  const Eigen::MatrixXd& shape_matrix() const;              // ellipsoid Q

  // smooth best-arm response: sphere J = 1, ellipsoid
  // J = lambda_max(Q) / sqrt(lambda_min(Q)); nullopt otherwise
  std::optional<double> sbar_constant() const;

  // samples pairs of unit z-vectors and measures
  // ||best_arm(z) - best_arm(y)|| / ||z - y||; throws for finite/polytope
  SbarCheckResult sbar_check(double J, std::int64_t n_pairs, std::uint64_t seed) const;

  std::string describe() const;

 private:
  ArmSet() = default;

  Kind kind_ = Kind::kSphere;
  PolytopeForm poly_form_ = PolytopeForm::kVertexList;
  Eigen::Index dim_ = 0;
  std::vector<Eigen::VectorXd> points_;  // finite arms or polytope vertices

  // ellipsoid data
  Eigen::MatrixXd shape_;      // Q
  Eigen::MatrixXd shape_inv_;  // Q^-1
  Eigen::VectorXd shape_eigenvalues_;
  Eigen::MatrixXd shape_eigenvectors_;
};

// smallest eigenvalue of sum_k b_k b_k' for an explicit arm list
double spanner_gram_lambda_min(const std::vector<Eigen::VectorXd>& arms);

}  // namespace linbandit
