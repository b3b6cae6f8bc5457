#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "linbandit/environment.hpp"

using namespace linbandit;

TEST_CASE("noise factories validate and report their sub-Gaussian scale") {
  CHECK(NoiseModel::gaussian(0.5).sigma0() == 0.5);
  CHECK(NoiseModel::uniform(0.3).sigma0() == 0.3);
  CHECK(NoiseModel::gaussian(0.0).sigma0() == 0.0);
  CHECK_THROWS_AS((void)NoiseModel::gaussian(-0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)NoiseModel::uniform(-1.0), std::invalid_argument);
}

TEST_CASE("zero-scale noise is exactly zero") {
  Rng rng(3);
  CHECK(NoiseModel::gaussian(0.0).sample(rng) == 0.0);
  CHECK(NoiseModel::uniform(0.0).sample(rng) == 0.0);
}

TEST_CASE("noise sample statistics") {
  Rng rng(11);
  const int n = 200000;
  for (const NoiseModel& nm : {NoiseModel::gaussian(2.0), NoiseModel::uniform(2.0)}) {
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = nm.sample(rng);
      sum += x;
      sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    const double expect_var = nm.kind == NoiseModel::Kind::kGaussian ? 4.0 : 4.0 / 3.0;
    CHECK(std::abs(mean) < 0.02);
    CHECK(var == doctest::Approx(expect_var).epsilon(0.02));
  }
}

TEST_CASE("uniform noise support") {
  Rng rng(5);
  const NoiseModel nm = NoiseModel::uniform(0.25);
  for (int i = 0; i < 10000; ++i) CHECK(std::abs(nm.sample(rng)) <= 0.25);
}

TEST_CASE("fixed-point prior returns the pinned parameter verbatim") {
  const Eigen::Vector3d z(0.1, -2.0, 5.5);
  const Prior prior = Prior::fixed_point(z);
  Rng rng(9);
  CHECK((prior.sample(3, rng) - z).norm() == 0.0);
  CHECK((sample_z(prior, 3, rng) - z).norm() == 0.0);
  CHECK_THROWS_AS((void)prior.sample(4, rng), std::invalid_argument);
}

TEST_CASE("isotropic prior has E||Z||^2 = 1") {
  Rng rng(13);
  const Prior prior = Prior::gaussian_isotropic();
  for (Eigen::Index r : {2, 5}) {
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) acc += prior.sample(r, rng).squaredNorm();
    CHECK(acc / n == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("iid priors match their marginals") {
  Rng rng(17);
  const int n = 100000;
  double acc = 0.0;
  const Prior g = Prior::iid_gaussian(0.5);
  for (int i = 0; i < n; ++i) acc += g.sample(2, rng).squaredNorm();
  CHECK(acc / n == doctest::Approx(2 * 0.25).epsilon(0.03));

  const Prior u = Prior::iid_uniform(-1.0, 2.0);
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd z = u.sample(2, rng);
    lo = std::min(lo, z.minCoeff());
    hi = std::max(hi, z.maxCoeff());
  }
  CHECK(lo >= -1.0);
  CHECK(hi <= 2.0);
  CHECK(lo < -0.99);
  CHECK(hi > 1.99);

  CHECK_THROWS_AS((void)Prior::iid_gaussian(0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)Prior::iid_uniform(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("pull returns u'z plus noise and validates membership") {
  const auto set = std::make_shared<const ArmSet>(ArmSet::sphere(2));
  const Eigen::Vector2d z(3.0, 4.0);
  const BanditInstance inst(set, z, NoiseModel::gaussian(0.0));
  Rng rng(1);
  CHECK(inst.pull(Eigen::Vector2d(0.6, 0.8), rng) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(inst.pull(Eigen::Vector2d(1.0, 0.0), rng) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS((void)inst.pull(Eigen::Vector2d(2.0, 0.0), rng), std::invalid_argument);
  CHECK(inst.z() == z);
  CHECK(inst.arms().dim() == 2);
}

TEST_CASE("instance construction validates dimensions") {
  const auto set = std::make_shared<const ArmSet>(ArmSet::sphere(2));
  CHECK_THROWS_AS(BanditInstance(set, Eigen::Vector3d(1, 0, 0), NoiseModel::gaussian(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(BanditInstance(nullptr, Eigen::Vector2d(1, 0), NoiseModel::gaussian(1.0)),
                  std::invalid_argument);
}

TEST_CASE("norm band estimate at the canonical operating point") {
  Rng rng(23);
  const auto est = norm_band_probability(0.09, 3.0, 2, 20000, rng);
  // 1 - 4 (0.09)^2 - 1/9
  CHECK(est.bound == doctest::Approx(0.8564888888888889).epsilon(1e-12));
  CHECK(est.p_hat + 3.0 * est.stderr_ >= est.bound);
  CHECK(est.p_hat <= 1.0);
  CHECK(est.stderr_ > 0.0);
}

TEST_CASE("norm band rejects parameters outside its hypothesis") {
  Rng rng(1);
  CHECK_THROWS_AS((void)norm_band_probability(0.0, 3.0, 2, 100, rng), std::invalid_argument);
  CHECK_THROWS_AS((void)norm_band_probability(0.6, 3.0, 2, 100, rng), std::invalid_argument);
  CHECK_THROWS_AS((void)norm_band_probability(0.09, 0.4, 2, 100, rng), std::invalid_argument);
}

TEST_CASE("trajectory step diagnostics default to NaN") {
  const TrajectoryStep st;
  CHECK(std::isnan(st.weighted_norm_sq));
  CHECK(std::isnan(st.radius));
}
