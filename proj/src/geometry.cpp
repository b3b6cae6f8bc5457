#include "linbandit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace linbandit {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Eigen::VectorXd unit_vector(Eigen::Index dim, Eigen::Index i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  e(i) = 1.0;
  return e;
}

}  // namespace

ArmSet ArmSet::sphere(Eigen::Index dim) {
  require(dim >= 2, "sphere: dim must be >= 2");
  ArmSet s;
  s.kind_ = Kind::kSphere;
  s.dim_ = dim;
  return s;
}

ArmSet ArmSet::ellipsoid(const Eigen::MatrixXd& shape) {
  require(shape.rows() == shape.cols(), "ellipsoid: Q must be square");
  require(shape.rows() >= 2, "ellipsoid: dim must be >= 2");
  require(shape.isApprox(shape.transpose(), 1e-12), "ellipsoid: Q must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(shape);
  require(eig.info() == Eigen::Success, "ellipsoid: eigendecomposition failed");
  require(eig.eigenvalues().minCoeff() > 0.0, "ellipsoid: Q must be positive definite");
  ArmSet s;
  s.kind_ = Kind::kEllipsoid;
  s.dim_ = shape.rows();
  s.shape_ = shape;
  s.shape_eigenvalues_ = eig.eigenvalues();
  s.shape_eigenvectors_ = eig.eigenvectors();
  s.shape_inv_ = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                 eig.eigenvectors().transpose();
  return s;
}

ArmSet ArmSet::finite(std::vector<Eigen::VectorXd> arms) {
  require(!arms.empty(), "finite: need at least one arm");
  const Eigen::Index dim = arms.front().size();
  require(dim >= 2, "finite: dim must be >= 2");
  for (const auto& a : arms) require(a.size() == dim, "finite: inconsistent arm dimensions");
  ArmSet s;
  s.kind_ = Kind::kFinite;
  s.dim_ = dim;
  s.points_ = std::move(arms);
  return s;
}

ArmSet ArmSet::polytope(std::vector<Eigen::VectorXd> vertices) {
  require(!vertices.empty(), "polytope: need at least one vertex");
  const Eigen::Index dim = vertices.front().size();
  require(dim >= 2, "polytope: dim must be >= 2");
  for (const auto& v : vertices)
    require(v.size() == dim, "polytope: inconsistent vertex dimensions");
  ArmSet s;
  s.kind_ = Kind::kPolytope;
  s.poly_form_ = PolytopeForm::kVertexList;
  s.dim_ = dim;
  s.points_ = std::move(vertices);
  return s;
}

ArmSet ArmSet::simplex(Eigen::Index dim) {
  require(dim >= 2, "simplex: dim must be >= 2");
  ArmSet s;
  s.kind_ = Kind::kPolytope;
  s.poly_form_ = PolytopeForm::kSimplex;
  s.dim_ = dim;
  s.points_.reserve(2 * dim);
  // canonical vertex order: +e1, -e1, +e2, -e2, ...
  for (Eigen::Index i = 0; i < dim; ++i) {
    s.points_.push_back(unit_vector(dim, i));
    s.points_.push_back(-unit_vector(dim, i));
  }
  return s;
}

ArmSet ArmSet::hypercube(Eigen::Index dim) {
  require(dim >= 2, "hypercube: dim must be >= 2");
  ArmSet s;
  s.kind_ = Kind::kPolytope;
  s.poly_form_ = PolytopeForm::kHypercube;
  s.dim_ = dim;
  // vertices materialized only in extreme_points(); 2^dim of them
  return s;
}

double ArmSet::max_norm() const {
  switch (kind_) {
    case Kind::kSphere:
      return 1.0;
    case Kind::kEllipsoid:
      return std::sqrt(shape_eigenvalues_.maxCoeff());
    case Kind::kFinite:
    case Kind::kPolytope: {
      if (poly_form_ == PolytopeForm::kHypercube && points_.empty())
        return std::sqrt(double(dim_));
      double m = 0.0;
      for (const auto& p : points_) m = std::max(m, p.norm());
      return m;
    }
  }
  return 0.0;
}

bool ArmSet::contains(const Eigen::VectorXd& u, double tol) const {
  if (u.size() != dim_) return false;
  switch (kind_) {
    case Kind::kSphere:
      return std::abs(u.squaredNorm() - 1.0) <= tol;
    case Kind::kEllipsoid:
      return u.dot(shape_inv_ * u) <= 1.0 + tol;
    case Kind::kFinite:
      break;
    case Kind::kPolytope:
      if (poly_form_ == PolytopeForm::kSimplex) return u.lpNorm<1>() <= 1.0 + tol;
      if (poly_form_ == PolytopeForm::kHypercube)
        return u.lpNorm<Eigen::Infinity>() <= 1.0 + tol;
      break;  // explicit vertex list: fall through to point match
  }
  // point-list membership; hull membership for arbitrary vertex lists is out
  // of scope (policies only ever play stored vertices)
  for (const auto& p : points_)
    if ((u - p).lpNorm<Eigen::Infinity>() <= tol) return true;
  return false;
}

Eigen::VectorXd ArmSet::best_arm(const Eigen::VectorXd& z) const {
  require(z.size() == dim_, "best_arm: z has wrong dimension");
  switch (kind_) {
    case Kind::kSphere: {
      const double n = z.norm();
      if (n == 0.0) return unit_vector(dim_, 0);
      return z / n;
    }
    case Kind::kEllipsoid: {
      Eigen::VectorXd w = shape_ * z;
      const double denom2 = z.dot(w);
      if (denom2 <= 0.0) {
        Eigen::VectorXd w0 = shape_.col(0);
        return w0 / std::sqrt(shape_(0, 0));
      }
      return w / std::sqrt(denom2);
    }
    case Kind::kFinite:
    case Kind::kPolytope: {
      if (poly_form_ == PolytopeForm::kHypercube && points_.empty()) {
        // vertex argmax in closed form; the >= 0 sign convention matches the
        // lowest-index rule under the canonical bit enumeration (bit set = -1)
        Eigen::VectorXd u(dim_);
        for (Eigen::Index i = 0; i < dim_; ++i) u(i) = z(i) >= 0.0 ? 1.0 : -1.0;
        return u;
      }
      std::size_t best = 0;
      double best_val = points_[0].dot(z);
      for (std::size_t i = 1; i < points_.size(); ++i) {
        const double v = points_[i].dot(z);
        if (v > best_val) {
          best = i;
          best_val = v;
        }
      }
      return points_[best];
    }
  }
  return unit_vector(dim_, 0);
}

double ArmSet::max_reward(const Eigen::VectorXd& z) const {
  require(z.size() == dim_, "max_reward: z has wrong dimension");
  switch (kind_) {
    case Kind::kSphere:
      return z.norm();
    case Kind::kEllipsoid: {
      const double q = z.dot(shape_ * z);
      return q > 0.0 ? std::sqrt(q) : 0.0;
    }
    case Kind::kFinite:
    case Kind::kPolytope:
      return best_arm(z).dot(z);
  }
  return 0.0;
}

double ArmSet::gap(const Eigen::VectorXd& z, const Eigen::VectorXd& u) const {
  require(contains(u), "gap: u is not a member of the arm set");
  double g = max_reward(z) - u.dot(z);
  if (g < 0.0) {
    // membership tolerance can leave u a hair outside the exact boundary
    require(g > -1e-7, "gap: negative beyond tolerance; inconsistent arm set state");
    g = 0.0;
  }
  return g;
}

double spanner_gram_lambda_min(const std::vector<Eigen::VectorXd>& arms) {
  const Eigen::Index dim = arms.front().size();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& a : arms) gram.noalias() += a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  return eig.eigenvalues().minCoeff();
}

SpannerArms ArmSet::spanner() const {
  SpannerArms out;
  switch (kind_) {
    case Kind::kSphere: {
      for (Eigen::Index i = 0; i < dim_; ++i) out.arms.push_back(unit_vector(dim_, i));
      out.lambda0 = 1.0;
      return out;
    }
    case Kind::kEllipsoid: {
      // principal semi-axes sqrt(lambda_i) v_i lie on the boundary and their
      // Gram sum is exactly Q
      for (Eigen::Index i = 0; i < dim_; ++i)
        out.arms.push_back(std::sqrt(shape_eigenvalues_(i)) * shape_eigenvectors_.col(i));
      out.lambda0 = shape_eigenvalues_.minCoeff();
      return out;
    }
    case Kind::kFinite:
    case Kind::kPolytope: {
      if (poly_form_ == PolytopeForm::kSimplex || poly_form_ == PolytopeForm::kHypercube) {
        // +-e_i are members of both the l1 and linf balls
        for (Eigen::Index i = 0; i < dim_; ++i) out.arms.push_back(unit_vector(dim_, i));
        out.lambda0 = 1.0;
        return out;
      }
      // greedy volume-maximizing selection: repeatedly take the candidate
      // with the largest component orthogonal to the span built so far
      std::vector<Eigen::VectorXd> residuals(points_.begin(), points_.end());
      std::vector<bool> used(points_.size(), false);
      double scale = 0.0;
      for (const auto& p : points_) scale = std::max(scale, p.norm());
      for (Eigen::Index step = 0; step < dim_; ++step) {
        std::size_t pick = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < points_.size(); ++i) {
          if (used[i]) continue;
          const double n = residuals[i].norm();
          if (n > best) {
            best = n;
            pick = i;
          }
        }
        if (best <= 1e-12 * std::max(scale, 1.0)) {
          std::ostringstream msg;
          msg << "spanner: arms span rank " << step << " of required " << dim_;
          throw std::invalid_argument(msg.str());
        }
        used[pick] = true;
        out.arms.push_back(points_[pick]);
        const Eigen::VectorXd q = residuals[pick] / best;
        for (std::size_t i = 0; i < points_.size(); ++i)
          if (!used[i]) residuals[i] -= q.dot(residuals[i]) * q;
      }
      out.lambda0 = spanner_gram_lambda_min(out.arms);
      return out;
    }
  }
  return out;
}

std::vector<Eigen::VectorXd> ArmSet::extreme_points() const {
  require(kind_ == Kind::kPolytope, "extreme_points: only defined for polytope sets");
  if (poly_form_ != PolytopeForm::kHypercube) return points_;
  require(dim_ <= 20, "extreme_points: hypercube dim > 20 refused (2^dim vertices)");
  std::vector<Eigen::VectorXd> verts;
  verts.reserve(std::size_t(1) << dim_);
  for (std::uint64_t b = 0; b < (std::uint64_t(1) << dim_); ++b) {
    Eigen::VectorXd v(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) v(i) = (b >> i) & 1 ? -1.0 : 1.0;
    verts.push_back(std::move(v));
  }
  return verts;
}

ArmSet ArmSet::extreme_points_as_finite() const { return ArmSet::finite(extreme_points()); }

const std::vector<Eigen::VectorXd>& ArmSet::points() const {
  require(!points_.empty(), "points: no stored arm list for this set");
  return points_;
}

const Eigen::MatrixXd& ArmSet::shape_matrix() const {
  require(kind_ == Kind::kEllipsoid, "shape_matrix: only defined for ellipsoid sets");
  return shape_;
}

std::optional<double> ArmSet::sbar_constant() const {
  if (kind_ == Kind::kSphere) return 1.0;
  if (kind_ == Kind::kEllipsoid)
    return shape_eigenvalues_.maxCoeff() / std::sqrt(shape_eigenvalues_.minCoeff());
  return std::nullopt;
}

SbarCheckResult ArmSet::sbar_check(double J, std::int64_t n_pairs, std::uint64_t seed) const {
  require(kind_ == Kind::kSphere || kind_ == Kind::kEllipsoid,
          "sbar_check: SBAR undefined for finite/polytope sets");
  require(J > 0.0, "sbar_check: J must be positive");
  require(n_pairs > 0, "sbar_check: need at least one pair");
  Rng rng(seed);
  auto unit_draw = [&] {
    Eigen::VectorXd v(dim_);
    double n = 0.0;
    do {
      for (Eigen::Index i = 0; i < dim_; ++i) v(i) = rng.normal();
      n = v.norm();
    } while (n == 0.0);
    return Eigen::VectorXd(v / n);
  };
  SbarCheckResult res;
  for (std::int64_t k = 0; k < n_pairs; ++k) {
    const Eigen::VectorXd z = unit_draw();
    const Eigen::VectorXd y = unit_draw();
    const double dzy = (z - y).norm();
    if (dzy == 0.0) continue;
    const double ratio = (best_arm(z) - best_arm(y)).norm() / dzy;
    res.worst_ratio = std::max(res.worst_ratio, ratio);
    ++res.pairs_checked;
  }
  res.pass = res.worst_ratio <= J * (1.0 + 1e-9);
  return res;
}

std::string ArmSet::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::kSphere:
      out << "sphere(r=" << dim_ << ")";
      break;
    case Kind::kEllipsoid:
      out << "ellipsoid(r=" << dim_ << ")";
      break;
    case Kind::kFinite:
      out << "finite(" << points_.size() << " arms, r=" << dim_ << ")";
      break;
    case Kind::kPolytope:
      if (poly_form_ == PolytopeForm::kSimplex)
        out << "simplex(r=" << dim_ << ")";
      else if (poly_form_ == PolytopeForm::kHypercube)
        out << "hypercube(r=" << dim_ << ")";
      else
        out << "polytope(" << points_.size() << " vertices, r=" << dim_ << ")";
      break;
  }
  return out.str();
}

}  // namespace linbandit
