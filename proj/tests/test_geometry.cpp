#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "linbandit/geometry.hpp"
#include "linbandit/rng.hpp"

using namespace linbandit;

namespace {

Eigen::MatrixXd diag41() {
  Eigen::MatrixXd q(2, 2);
  q << 4.0, 0.0, 0.0, 1.0;
  return q;
}

}  // namespace

TEST_CASE("sphere best arm is the normalized parameter") {
  const ArmSet set = ArmSet::sphere(2);
  const Eigen::Vector2d z(3.0, 4.0);
  CHECK((set.best_arm(z) - Eigen::Vector2d(0.6, 0.8)).norm() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(set.max_reward(z) == doctest::Approx(5.0).epsilon(1e-15));
  // degenerate parameter falls back to the first coordinate direction
  CHECK((set.best_arm(Eigen::Vector2d::Zero()) - Eigen::Vector2d(1.0, 0.0)).norm() == 0.0);
}

TEST_CASE("ellipsoid best arm matches Qz normalized by sqrt(z'Qz)") {
  const ArmSet set = ArmSet::ellipsoid(diag41());
  CHECK((set.best_arm(Eigen::Vector2d(1.0, 0.0)) - Eigen::Vector2d(2.0, 0.0)).norm() ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK((set.best_arm(Eigen::Vector2d(0.0, 1.0)) - Eigen::Vector2d(0.0, 1.0)).norm() ==
        doctest::Approx(0.0).epsilon(1e-14));
  const Eigen::Vector2d z(1.0, 1.0);
  const Eigen::Vector2d expect = Eigen::Vector2d(4.0, 1.0) / std::sqrt(5.0);
  CHECK((set.best_arm(z) - expect).norm() < 1e-14);
  CHECK(set.max_reward(z) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  CHECK((set.best_arm(Eigen::Vector2d::Zero()) - Eigen::Vector2d(2.0, 0.0)).norm() < 1e-14);
}

TEST_CASE("ellipsoid closed form agrees with a dense boundary grid") {
  // independent check: parameterize the boundary as Q^{1/2} (cos, sin)
  const ArmSet set = ArmSet::ellipsoid(diag41());
  const Eigen::Vector2d z(0.7, -1.3);
  double grid_best = -1e300;
  Eigen::Vector2d grid_arm;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * std::numbers::pi * double(i) / double(n);
    const Eigen::Vector2d u(2.0 * std::cos(th), std::sin(th));
    if (u.dot(z) > grid_best) {
      grid_best = u.dot(z);
      grid_arm = u;
    }
  }
  CHECK(std::abs(set.max_reward(z) - grid_best) < 1e-7);
  CHECK((set.best_arm(z) - grid_arm).norm() < 1e-3);
  CHECK(set.max_reward(z) >= grid_best - 1e-12);  // grid can never win
}

TEST_CASE("finite best arm takes the lowest index among ties") {
  const std::vector<Eigen::VectorXd> arms{Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0),
                                          Eigen::Vector2d(1.0, 0.0)};
  const ArmSet set = ArmSet::finite(arms);
  const Eigen::Vector2d z(1.0, 1.0);  // arms 0 and 1 tie, arm 2 duplicates 0
  CHECK((set.best_arm(z) - Eigen::Vector2d(1.0, 0.0)).norm() == 0.0);
}

TEST_CASE("simplex vertices are the signed coordinate directions in canonical order") {
  const ArmSet set = ArmSet::simplex(3);
  const auto verts = set.extreme_points();
  REQUIRE(verts.size() == 6);
  const std::vector<Eigen::Vector3d> expect{
      {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (std::size_t i = 0; i < 6; ++i) CHECK((verts[i] - expect[i]).norm() == 0.0);
  CHECK((set.best_arm(Eigen::Vector3d(1.0, -1.0, 1.0)) - Eigen::Vector3d(1, 0, 0)).norm() == 0.0);
}

TEST_CASE("hypercube best arm is the sign vector, nonnegative entries up") {
  const ArmSet set = ArmSet::hypercube(2);
  CHECK((set.best_arm(Eigen::Vector2d(0.5, -0.3)) - Eigen::Vector2d(1, -1)).norm() == 0.0);
  CHECK((set.best_arm(Eigen::Vector2d::Zero()) - Eigen::Vector2d(1, 1)).norm() == 0.0);
  const auto verts = set.extreme_points();
  REQUIRE(verts.size() == 4);
  // bit enumeration: bit set means -1, lowest coordinate is the low bit
  CHECK((verts[0] - Eigen::Vector2d(1, 1)).norm() == 0.0);
  CHECK((verts[1] - Eigen::Vector2d(-1, 1)).norm() == 0.0);
  CHECK((verts[2] - Eigen::Vector2d(1, -1)).norm() == 0.0);
  CHECK((verts[3] - Eigen::Vector2d(-1, -1)).norm() == 0.0);
  CHECK_THROWS_AS((void)ArmSet::hypercube(21).extreme_points(), std::invalid_argument);
}

TEST_CASE("membership respects each boundary") {
  CHECK(ArmSet::sphere(2).contains(Eigen::Vector2d(0.6, 0.8)));
  CHECK_FALSE(ArmSet::sphere(2).contains(Eigen::Vector2d(0.6, 0.79)));
  const ArmSet ell = ArmSet::ellipsoid(diag41());
  CHECK(ell.contains(Eigen::Vector2d(2.0, 0.0)));
  CHECK(ell.contains(Eigen::Vector2d(0.5, 0.5)));
  CHECK_FALSE(ell.contains(Eigen::Vector2d(2.1, 0.0)));
  const ArmSet sim = ArmSet::simplex(2);
  CHECK(sim.contains(Eigen::Vector2d(0.5, 0.5)));
  CHECK_FALSE(sim.contains(Eigen::Vector2d(0.6, 0.5)));
  const ArmSet cube = ArmSet::hypercube(2);
  CHECK(cube.contains(Eigen::Vector2d(1.0, -1.0)));
  CHECK(cube.contains(Eigen::Vector2d(0.2, -0.9)));
  CHECK_FALSE(cube.contains(Eigen::Vector2d(1.001, 0.0)));
}

TEST_CASE("gap is max reward minus the arm's reward") {
  const ArmSet set = ArmSet::sphere(2);
  const Eigen::Vector2d z(3.0, 4.0);
  CHECK(set.gap(z, Eigen::Vector2d(1.0, 0.0)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(set.gap(z, set.best_arm(z)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS((void)set.gap(z, Eigen::Vector2d(2.0, 0.0)), std::invalid_argument);
}

TEST_CASE("max norm per arm set") {
  CHECK(ArmSet::sphere(5).max_norm() == 1.0);
  CHECK(ArmSet::ellipsoid(diag41()).max_norm() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ArmSet::simplex(4).max_norm() == 1.0);
  CHECK(ArmSet::hypercube(4).max_norm() == doctest::Approx(2.0).epsilon(1e-14));
  const std::vector<Eigen::VectorXd> arms{Eigen::Vector2d(0.3, 0.4), Eigen::Vector2d(3.0, 4.0)};
  CHECK(ArmSet::finite(arms).max_norm() == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("spanner arms and their Gram eigenvalue floor") {
  const SpannerArms sp = ArmSet::sphere(3).spanner();
  REQUIRE(sp.arms.size() == 3);
  CHECK(sp.lambda0 == doctest::Approx(1.0).epsilon(1e-14));

  // two-arm design; smallest Gram eigenvalue solves lambda^2 - 3 lambda + 1 = 0
  const std::vector<Eigen::VectorXd> arms{Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(1.0, 1.0)};
  const SpannerArms spf = ArmSet::finite(arms).spanner();
  REQUIRE(spf.arms.size() == 2);
  const double root = (3.0 - std::sqrt(5.0)) / 2.0;  // 0.3819660112501051
  CHECK(spf.lambda0 == doctest::Approx(root).epsilon(1e-12));
  CHECK(spanner_gram_lambda_min(spf.arms) == doctest::Approx(root).epsilon(1e-12));

  const SpannerArms spe = ArmSet::ellipsoid(diag41()).spanner();
  CHECK(spe.lambda0 == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(2, 2);
  for (const auto& b : spe.arms) gram += b * b.transpose();
  CHECK((gram - diag41()).norm() < 1e-12);  // semi-axis arms reproduce Q

  CHECK(ArmSet::simplex(3).spanner().lambda0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ArmSet::hypercube(3).spanner().lambda0 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("spanner rejects rank-deficient arm collections") {
  const std::vector<Eigen::VectorXd> arms{Eigen::Vector3d(1.0, 0.0, 0.0),
                                          Eigen::Vector3d(2.0, 0.0, 0.0),
                                          Eigen::Vector3d(-1.0, 0.0, 0.0)};
  CHECK_THROWS_WITH_AS((void)ArmSet::finite(arms).spanner(),
                       doctest::Contains("rank"), std::invalid_argument);
}

TEST_CASE("smooth best-arm response constants and check") {
  CHECK(ArmSet::sphere(2).sbar_constant().value() == 1.0);
  CHECK(ArmSet::ellipsoid(diag41()).sbar_constant().value() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_FALSE(ArmSet::finite({Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)}).sbar_constant());

  const auto ok = ArmSet::sphere(2).sbar_check(1.0, 10000, 7);
  CHECK(ok.pass);
  CHECK(ok.pairs_checked == 10000);
  const auto ell4 = ArmSet::ellipsoid(diag41()).sbar_check(4.0, 10000, 7);
  CHECK(ell4.pass);
  // J = 1 undershoots the true Lipschitz constant of this ellipsoid
  const auto ell1 = ArmSet::ellipsoid(diag41()).sbar_check(1.0, 10000, 7);
  CHECK_FALSE(ell1.pass);
  CHECK(ell1.worst_ratio > 1.0);
  CHECK(ell1.worst_ratio <= 4.0 * (1 + 1e-9));
}

TEST_CASE("vertex list polytope and conversion to a finite set") {
  const ArmSet sim = ArmSet::simplex(3);
  const ArmSet fin = sim.extreme_points_as_finite();
  CHECK(fin.is_finite());
  CHECK(fin.points().size() == 6);
  CHECK(fin.max_norm() == 1.0);

  const std::vector<Eigen::VectorXd> verts{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1),
                                           Eigen::Vector2d(-1, -1)};
  const ArmSet poly = ArmSet::polytope(verts);
  CHECK(poly.is_polytope());
  CHECK(poly.contains(Eigen::Vector2d(-1, -1)));
  CHECK((poly.best_arm(Eigen::Vector2d(1.0, 0.1)) - Eigen::Vector2d(1, 0)).norm() == 0.0);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS((void)ArmSet::sphere(1), std::invalid_argument);
  CHECK_THROWS_AS((void)ArmSet::simplex(1), std::invalid_argument);
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // symmetric but indefinite
  CHECK_THROWS_AS((void)ArmSet::ellipsoid(bad), std::invalid_argument);
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS((void)ArmSet::ellipsoid(asym), std::invalid_argument);
  CHECK_THROWS_AS((void)ArmSet::finite({}), std::invalid_argument);
  CHECK_THROWS_AS(
      (void)ArmSet::finite({Eigen::Vector2d(1, 0), Eigen::Vector3d(1, 0, 0)}),
      std::invalid_argument);
}

TEST_CASE("describe names the set") {
  CHECK(ArmSet::sphere(3).describe().find("sphere") != std::string::npos);
  CHECK(ArmSet::hypercube(3).describe().find("hypercube") != std::string::npos);
}
