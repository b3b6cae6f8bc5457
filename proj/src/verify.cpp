#include "linbandit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "linbandit/harness.hpp"

namespace linbandit {

namespace {

Eigen::VectorXd unit_vec(Eigen::Index dim, Eigen::Index i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  e(i) = 1.0;
  return e;
}

Eigen::VectorXd random_unit(Eigen::Index dim, Rng& rng) {
  Eigen::VectorXd v(dim);
  double n = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.normal();
    n = v.norm();
  } while (n == 0.0);
  return v / n;
}

// smallest eigenvalue oracles, independent of the library solver
double lambda_min_bisection(const Eigen::MatrixXd& m) {
  // characteristic polynomial sign bisection; fine for r <= 3
  const Eigen::Index r = m.rows();
  auto charpoly = [&](double lam) {
    return (m - lam * Eigen::MatrixXd::Identity(r, r)).determinant();
  };
  double lo = 0.0, hi = m.trace() + 1.0;
  // det(m - lam I) has sign (-1)^r for lam above all eigenvalues
  const double sign_hi = (r % 2 == 0) ? 1.0 : -1.0;
  // walk up from zero until the polynomial changes away from its value at
  // the smallest eigenvalue; standard bracketing on the lowest root
  double flo = charpoly(lo);
  if (flo == 0.0) return 0.0;
  double step = hi / 1024.0;
  double x = lo;
  while (x < hi) {
    const double fx = charpoly(x + step);
    if (fx == 0.0) return x + step;
    if ((fx > 0.0) != (flo > 0.0)) break;
    x += step;
  }
  double a = x, b = x + step;
  for (int it = 0; it < 200; ++it) {
    const double mid = (a + b) / 2.0;
    const double fm = charpoly(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0))
      a = mid;
    else
      b = mid;
  }
  (void)sign_hi;
  return (a + b) / 2.0;
}

double lambda_min_inverse_power(const Eigen::MatrixXd& m, Rng& rng) {
  const Eigen::Index r = m.rows();
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  Eigen::VectorXd v = random_unit(r, rng);
  double lam = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd w = llt.solve(v);
    w.normalize();
    lam = w.dot(m * w);
    if ((m * w - lam * w).norm() < 1e-10) return lam;
    v = w;
  }
  return lam;
}

struct Suite {
  std::vector<CheckResult> results;

  void add(const std::string& name, bool pass, double measured, double bound,
           std::string note = "") {
    results.push_back({name, pass, measured, bound, std::move(note)});
  }
};

ExperimentConfig base_config(const std::string& id, std::int64_t horizon, std::int64_t reps,
                             std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.experiment_id = id;
  cfg.arm_set.kind = "sphere";
  cfg.arm_set.dim = 2;
  cfg.horizon = horizon;
  cfg.replications = reps;
  cfg.base_seed = seed;
  return cfg;
}

// ---------------------------------------------------------------------------

void geometry_suite(Suite& s, std::uint64_t seed) {
  Rng rng(derive_key(seed, fnv1a64("verify.geometry"), 0, StreamRole::kCheck));

  {  // finite argmax against exhaustive scan
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
      const Eigen::Index r = 2 + trial % 4;
      std::vector<Eigen::VectorXd> arms;
      for (int i = 0; i < 30; ++i) arms.push_back(random_unit(r, rng) * rng.uniform(0.1, 3.0));
      const ArmSet set = ArmSet::finite(arms);
      const Eigen::VectorXd z = random_unit(r, rng) * rng.uniform(0.1, 3.0);
      double best = -1e300;
      std::size_t best_i = 0;
      for (std::size_t i = 0; i < arms.size(); ++i)
        if (arms[i].dot(z) > best) {
          best = arms[i].dot(z);
          best_i = i;
        }
      worst = std::max(worst, (set.best_arm(z) - arms[best_i]).norm());
    }
    s.add("geometry.best_arm.finite_bruteforce", worst == 0.0, worst, 0.0);
  }

  {  // closed forms against a dense boundary grid (sphere and ellipsoid)
    const Eigen::Index n_grid = 100000;
    auto grid_gap = [&](const ArmSet& set, const Eigen::MatrixXd& boundary) {
      double worst = 0.0;
      for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd z = random_unit(2, rng) * rng.uniform(0.2, 3.0);
        const double closed = set.max_reward(z);
        const double grid = (boundary * z).maxCoeff();
        worst = std::max(worst, std::abs(closed - grid));
        // grid points are members; they can never beat the closed form
        worst = std::max(worst, grid - closed);
      }
      return worst;
    };
    Eigen::MatrixXd circle(n_grid, 2);
    for (Eigen::Index i = 0; i < n_grid; ++i) {
      const double th = 2.0 * std::numbers::pi * double(i) / double(n_grid);
      circle(i, 0) = std::cos(th);
      circle(i, 1) = std::sin(th);
    }
    const double sphere_gap = grid_gap(ArmSet::sphere(2), circle);
    s.add("geometry.best_arm.sphere_grid_oracle", sphere_gap <= 1e-6, sphere_gap, 1e-6);

    Eigen::MatrixXd q(2, 2);
    q << 4.0, 0.0, 0.0, 1.0;
    Eigen::MatrixXd sqrtq(2, 2);
    sqrtq << 2.0, 0.0, 0.0, 1.0;
    const double ell_gap = grid_gap(ArmSet::ellipsoid(q), circle * sqrtq);
    s.add("geometry.best_arm.ellipsoid_grid_oracle", ell_gap <= 1e-6, ell_gap, 1e-6);
  }

  {  // positive scaling of z never moves the best arm
    double worst = 0.0;
    const ArmSet sphere = ArmSet::sphere(3);
    Eigen::MatrixXd q(2, 2);
    q << 4.0, 1.0, 1.0, 2.0;
    const ArmSet ell = ArmSet::ellipsoid(q);
    std::vector<Eigen::VectorXd> arms;
    for (int i = 0; i < 20; ++i) arms.push_back(random_unit(3, rng));
    const ArmSet fin = ArmSet::finite(arms);
    for (double lam : {1e-6, 1e-3, 1.0, 1e3, 1e6}) {
      for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd z3 = random_unit(3, rng) * rng.uniform(0.1, 2.0);
        const Eigen::VectorXd z2 = random_unit(2, rng) * rng.uniform(0.1, 2.0);
        worst = std::max(worst,
                         (sphere.best_arm(lam * z3) - sphere.best_arm(z3)).norm());
        worst = std::max(worst, (ell.best_arm(lam * z2) - ell.best_arm(z2)).norm());
        worst = std::max(worst, (fin.best_arm(lam * z3) - fin.best_arm(z3)).norm());
      }
    }
    s.add("geometry.best_arm.scale_invariance", worst <= 1e-12, worst, 1e-12);
  }

  {  // gap is nonnegative and vanishes at the best arm
    double worst = 0.0;
    const ArmSet sphere = ArmSet::sphere(2);
    Eigen::MatrixXd q(2, 2);
    q << 4.0, 0.0, 0.0, 1.0;
    const ArmSet ell = ArmSet::ellipsoid(q);
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::VectorXd z = random_unit(2, rng) * rng.uniform(0.1, 3.0);
      worst = std::max(worst, std::abs(sphere.gap(z, sphere.best_arm(z))));
      worst = std::max(worst, std::abs(ell.gap(z, ell.best_arm(z))));
      const Eigen::VectorXd other = random_unit(2, rng);
      if (sphere.gap(z, other) < 0.0) worst = std::max(worst, 1.0);
    }
    s.add("geometry.gap.zero_at_best", worst <= 1e-12, worst, 1e-12);
  }

  {  // spanner lambda0 against independent eigenvalue oracles
    double worst = 0.0;
    const SpannerArms sp3 = ArmSet::sphere(3).spanner();
    worst = std::max(worst, std::abs(sp3.lambda0 - 1.0));

    std::vector<Eigen::VectorXd> arms{Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(1.0, 1.0)};
    const SpannerArms spf = ArmSet::finite(arms).spanner();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(2, 2);
    for (const auto& b : spf.arms) gram += b * b.transpose();
    worst = std::max(worst, std::abs(spf.lambda0 - lambda_min_bisection(gram)));
    // closed form for this design: (3 - sqrt(5)) / 2
    worst = std::max(worst, std::abs(spf.lambda0 - (3.0 - std::sqrt(5.0)) / 2.0));

    Eigen::MatrixXd q(2, 2);
    q << 4.0, 0.0, 0.0, 1.0;
    const SpannerArms spe = ArmSet::ellipsoid(q).spanner();
    worst = std::max(worst, std::abs(spe.lambda0 - 1.0));

    std::vector<Eigen::VectorXd> arms4;
    for (int i = 0; i < 12; ++i) arms4.push_back(random_unit(4, rng) * rng.uniform(0.5, 2.0));
    const SpannerArms sp4 = ArmSet::finite(arms4).spanner();
    Eigen::MatrixXd gram4 = Eigen::MatrixXd::Zero(4, 4);
    for (const auto& b : sp4.arms) gram4 += b * b.transpose();
    worst = std::max(worst, std::abs(sp4.lambda0 - lambda_min_inverse_power(gram4, rng)));
    s.add("geometry.spanner.lambda_min_oracle", worst <= 1e-8, worst, 1e-8);
  }

  {  // || w/||w|| - z/||z|| || <= 2 ||w - z|| / max(||w||, ||z||)
    double worst = -1e300;
    for (int i = 0; i < 100000; ++i) {
      Eigen::Vector2d w(rng.normal(), rng.normal());
      Eigen::Vector2d z(rng.normal(), rng.normal());
      const double nw = w.norm(), nz = z.norm();
      if (nw == 0.0 || nz == 0.0) continue;
      const double lhs = (w / nw - z / nz).norm();
      const double rhs = 2.0 * (w - z).norm() / std::max(nw, nz);
      worst = std::max(worst, lhs - rhs);
    }
    s.add("geometry.normalized_difference_bound", worst <= 1e-12, worst, 1e-12);
  }

  {  // smooth best-arm response constants
    const auto sph = ArmSet::sphere(2).sbar_check(1.0, 10000, derive_key(seed, 11, 0, StreamRole::kCheck));
    s.add("geometry.sbar.sphere", sph.pass, sph.worst_ratio, 1.0);
    Eigen::MatrixXd q(2, 2);
    q << 4.0, 0.0, 0.0, 1.0;
    const ArmSet ell = ArmSet::ellipsoid(q);
    const double J = ell.sbar_constant().value();
    const auto res = ell.sbar_check(J, 10000, derive_key(seed, 12, 0, StreamRole::kCheck));
    s.add("geometry.sbar.ellipsoid", res.pass && J == 4.0, res.worst_ratio, J);
  }

  {  // extreme point materialization
    bool ok = ArmSet::simplex(3).extreme_points().size() == 6;
    ok = ok && ArmSet::hypercube(2).extreme_points().size() == 4;
    bool threw = false;
    try {
      ArmSet::hypercube(21).extreme_points();
    } catch (const std::invalid_argument&) {
      threw = true;
    }
    ok = ok && threw;
    s.add("geometry.extreme_points.counts", ok, ok ? 1.0 : 0.0, 1.0);
  }
}

// ---------------------------------------------------------------------------

void environment_suite(Suite& s, std::uint64_t seed) {
  Rng rng(derive_key(seed, fnv1a64("verify.environment"), 0, StreamRole::kCheck));

  {  // both noise menus are centered
    double worst = 0.0;
    for (const NoiseModel& nm : {NoiseModel::gaussian(1.0), NoiseModel::uniform(1.0)}) {
      const std::int64_t n = 1000000;
      double sum = 0.0, sumsq = 0.0;
      for (std::int64_t i = 0; i < n; ++i) {
        const double x = nm.sample(rng);
        sum += x;
        sumsq += x * x;
      }
      const double mean = sum / double(n);
      const double sd = std::sqrt(sumsq / double(n) - mean * mean);
      worst = std::max(worst, std::abs(mean) / (sd / std::sqrt(double(n))));
    }
    s.add("environment.noise.zero_mean", worst <= 5.0, worst, 5.0, "|mean|/stderr");
  }

  {  // isotropic prior covariance is I/r
    const Eigen::Index r = 3;
    const std::int64_t n = 200000;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(r, r);
    const Prior prior = Prior::gaussian_isotropic();
    for (std::int64_t i = 0; i < n; ++i) {
      const Eigen::VectorXd z = prior.sample(r, rng);
      acc += z * z.transpose();
    }
    acc /= double(n);
    const double dev = (acc - Eigen::MatrixXd::Identity(r, r) / double(r))
                           .cwiseAbs()
                           .maxCoeff();
    const double bound = 8.0 * std::sqrt(2.0) / (double(r) * std::sqrt(double(n)));
    s.add("environment.prior.isotropic_covariance", dev <= bound, dev, bound);
  }

  {  // zero-noise pulls are exactly u'z
    double worst = 0.0;
    const auto set = std::make_shared<const ArmSet>(ArmSet::sphere(3));
    for (int i = 0; i < 100; ++i) {
      const Eigen::VectorXd z = random_unit(3, rng) * rng.uniform(0.1, 2.0);
      const Eigen::VectorXd u = random_unit(3, rng);
      const BanditInstance inst(set, z, NoiseModel::gaussian(0.0));
      worst = std::max(worst, std::abs(inst.pull(u, rng) - u.dot(z)));
    }
    s.add("environment.pull.zero_noise_linearity", worst == 0.0, worst, 0.0);
  }

  {  // cumulative regret matches the running sum and never decreases
    ExperimentConfig cfg = base_config("verify-env-traj", 300, 1, seed);
    cfg.policy.name = "pege";
    const Eigen::Vector2d z(0.6, 0.8);
    const TrajectoryRecord rec = run_trajectory(cfg, z, 0);
    double cum = 0.0;
    std::size_t cp = 0;
    double worst = 0.0;
    bool monotone = true;
    double prev = 0.0;
    for (std::size_t i = 0; i < rec.steps.size(); ++i) {
      if (rec.steps[i].instant_regret < 0.0) monotone = false;
      cum += rec.steps[i].instant_regret;
      if (cp < rec.checkpoints.size() && rec.checkpoints[cp] == std::int64_t(i + 1)) {
        worst = std::max(worst, std::abs(cum - rec.cumulative_regret[cp]));
        if (rec.cumulative_regret[cp] < prev) monotone = false;
        prev = rec.cumulative_regret[cp];
        ++cp;
      }
    }
    s.add("environment.regret.accumulation", monotone && worst == 0.0, worst, 0.0);
  }

  {  // norm-band probability dominates 1 - 4 theta^2 - 1/beta^2
    double worst_margin = 1e300;
    for (double theta : {0.05, 0.2, 0.35, 0.5}) {
      for (double beta : {1.5, 3.0}) {
        for (Eigen::Index r : {2, 4}) {
          const auto est = norm_band_probability(theta, beta, r, 200000, rng);
          worst_margin = std::min(worst_margin, est.p_hat + 3.0 * est.stderr_ - est.bound);
        }
      }
    }
    s.add("environment.norm_band.probability_floor", worst_margin >= 0.0, worst_margin, 0.0,
          "min over grid of p_hat + 3 se - bound");
  }

  {  // E||Z|| <= 1 and E[1/||Z||] <= sqrt(pi)
    double worst = -1e300;
    for (Eigen::Index r : {2, 8}) {
      const std::int64_t n = 100000;
      const Prior prior = Prior::gaussian_isotropic();
      double s1 = 0.0, q1 = 0.0, s2 = 0.0, q2 = 0.0;
      for (std::int64_t i = 0; i < n; ++i) {
        const double nz = prior.sample(r, rng).norm();
        s1 += nz;
        q1 += nz * nz;
        s2 += 1.0 / nz;
        q2 += 1.0 / (nz * nz);
      }
      const double m1 = s1 / double(n);
      const double se1 = std::sqrt((q1 / double(n) - m1 * m1) / double(n));
      const double m2 = s2 / double(n);
      const double se2 = std::sqrt((q2 / double(n) - m2 * m2) / double(n));
      worst = std::max(worst, m1 - 3.0 * se1 - 1.0);
      worst = std::max(worst, m2 - 3.0 * se2 - std::sqrt(std::numbers::pi));
    }
    s.add("environment.prior.norm_moments", worst <= 0.0, worst, 0.0,
          "max excess over the moment bounds minus 3 se");
  }

  {  // fixed-point prior returns z verbatim
    const Eigen::Vector3d z(0.3, -1.2, 2.0);
    const Prior prior = Prior::fixed_point(z);
    const double dev = (prior.sample(3, rng) - z).norm();
    s.add("environment.prior.fixed_point_verbatim", dev == 0.0, dev, 0.0);
  }

  {  // uniform noise never leaves its support
    const NoiseModel nm = NoiseModel::uniform(0.7);
    double worst = 0.0;
    for (int i = 0; i < 200000; ++i) worst = std::max(worst, std::abs(nm.sample(rng)));
    s.add("environment.noise.uniform_support", worst <= 0.7, worst, 0.7);
  }
}

// ---------------------------------------------------------------------------

void estimation_suite(Suite& s, std::uint64_t seed) {
  Rng rng(derive_key(seed, fnv1a64("verify.estimation"), 0, StreamRole::kCheck));

  {  // exact recovery with zero noise
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Index r = 4;
      const Eigen::VectorXd z = random_unit(r, rng) * rng.uniform(0.2, 2.0);
      std::vector<Eigen::VectorXd> arms;
      std::vector<double> rewards;
      for (Eigen::Index i = 0; i < r; ++i) {
        arms.push_back(unit_vec(r, i));
        rewards.push_back(z(i));
      }
      OlsState ols = OlsState::init(arms, rewards);
      for (int t = 0; t < 30; ++t) {
        const Eigen::VectorXd u = random_unit(r, rng);
        ols.update(u, u.dot(z));
      }
      worst = std::max(worst, (ols.estimate() - z).norm());
    }
    s.add("estimation.ols.zero_noise_recovery", worst <= 1e-9, worst, 1e-9);
  }

  double sm_worst = 0.0;
  double det_worst = 0.0;
  {  // rank-one updates track the direct inverse and determinant
    const Eigen::Index r = 3;
    std::vector<Eigen::VectorXd> arms{unit_vec(r, 0), unit_vec(r, 1), unit_vec(r, 2)};
    std::vector<double> rewards{0.1, -0.2, 0.3};
    OlsState ols = OlsState::init(arms, rewards);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(r, r);
    for (int t = 0; t < 1000; ++t) {
      const Eigen::VectorXd u = random_unit(r, rng);
      ols.update(u, rng.normal());
      gram += u * u.transpose();
    }
    const Eigen::MatrixXd direct = gram.llt().solve(Eigen::MatrixXd::Identity(r, r));
    sm_worst = (direct - ols.gram_inverse()).norm() / direct.norm();
    s.add("estimation.ols.sherman_morrison_vs_direct", sm_worst <= 1e-8, sm_worst, 1e-8);

    const double direct_logdet = std::log(gram.determinant());
    det_worst = std::abs(ols.log_det_gram() - direct_logdet) /
                std::max(1.0, std::abs(direct_logdet));
    s.add("estimation.ols.determinant_recursion", det_worst <= 1e-6, det_worst, 1e-6);

    const double ne = (ols.estimate() - ols.gram_inverse() * ols.response_acc()).norm();
    s.add("estimation.ols.normal_equations", ne <= 1e-9, ne, 1e-9);
  }

  {  // Gram eigenvalue floor after spanner initialization
    const ArmSet set = ArmSet::sphere(3);
    const SpannerArms sp = set.spanner();
    std::vector<double> rewards(sp.arms.size(), 0.0);
    OlsState ols = OlsState::init(sp.arms, rewards);
    double worst = 1e300;
    for (int t = 0; t < 200; ++t) {
      ols.update(random_unit(3, rng), rng.normal());
      const double lmin =
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ols.gram()).eigenvalues().minCoeff();
      worst = std::min(worst, lmin - sp.lambda0 * (1.0 - 1e-9));
    }
    s.add("estimation.ols.gram_eigenvalue_floor", worst >= 0.0, worst, 0.0);
  }

  {  // radius constants against direct evaluation
    double worst = 0.0;
    const UncertaintyParams p = UncertaintyParams::theoretical(1.0, 1.0, 1.0, std::nullopt);
    worst = std::max(worst, std::abs(p.kappa0 - 2.0 * std::sqrt(1.0 + std::log(37.0))));
    worst = std::max(worst, std::abs(p.alpha - 16.0 * (1.0 + std::log(37.0))));
    const UncertaintyParams p2 = UncertaintyParams::theoretical(0.5, 2.0, 0.5, 7);
    const double k2 = 2.0 * std::sqrt(1.0 + std::log(1.0 + 36.0 * 4.0 / 0.5));
    worst = std::max(worst, std::abs(p2.kappa0 - k2));
    worst = std::max(worst, std::abs(p2.alpha - 4.0 * 0.5 * k2 * k2));

    // positive homogeneity in u
    std::vector<Eigen::VectorXd> arms{unit_vec(2, 0), unit_vec(2, 1)};
    OlsState ols = OlsState::init(arms, {0.4, -0.1});
    ols.update(Eigen::Vector2d(0.6, 0.8), 0.2);
    const Eigen::Vector2d u(0.3, -0.5);
    const double r1 = uncertainty_radius(ols, p, u);
    const double r2 = uncertainty_radius(ols, p, 2.0 * u);
    worst = std::max(worst, std::abs(r2 - 2.0 * r1) / r1);
    s.add("estimation.radius.constants_and_homogeneity", worst <= 1e-12, worst, 1e-12);
  }

  {  // posterior covariance equals (r I + sum U U')^-1 under unit noise
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index r = 2 + trial % 3;
      GaussianPosterior post = GaussianPosterior::isotropic_prior(r);
      Eigen::MatrixXd m = double(r) * Eigen::MatrixXd::Identity(r, r);
      const int T = 1 + int(rng.uniform(0.0, 40.0));
      for (int t = 0; t < T; ++t) {
        const Eigen::VectorXd u = random_unit(r, rng);
        post.update(u, rng.normal(), 1.0);
        m += u * u.transpose();
      }
      const Eigen::MatrixXd direct = m.llt().solve(Eigen::MatrixXd::Identity(r, r));
      worst = std::max(worst, (post.covariance - direct).cwiseAbs().maxCoeff());
    }
    s.add("estimation.posterior.gram_identity", worst <= 1e-10, worst, 1e-10);
  }

  {  // directional variance floor var_k >= 1/(r + Xi_k)
    double worst = 1e300;
    const Prior prior = Prior::gaussian_isotropic();
    for (int trial = 0; trial < 1000; ++trial) {
      const Eigen::Index r = 2 + trial % 3;
      const Eigen::VectorXd z = prior.sample(r, rng);
      GaussianPosterior post = GaussianPosterior::isotropic_prior(r);
      std::vector<Eigen::VectorXd> arms;
      const int T = 1 + int(rng.uniform(0.0, 40.0));
      for (int t = 0; t < T; ++t) {
        const Eigen::VectorXd u = random_unit(r, rng);
        post.update(u, u.dot(z) + rng.normal(), 1.0);
        arms.push_back(u);
      }
      for (const auto& d : directional_risk_terms(arms, post, z))
        worst = std::min(worst, d.variance - 1.0 / (double(r) + d.exploration));
    }
    s.add("estimation.posterior.directional_variance_floor", worst >= -1e-10, worst, -1e-10);
  }

  {  // diagonal inverse inequality on random shifted PSD matrices
    double worst = 1e300;
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::MatrixXd b(3, 5);
      for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 5; ++j) b(i, j) = rng.normal();
      const Eigen::MatrixXd m =
          3.0 * Eigen::MatrixXd::Identity(3, 3) + b * b.transpose();
      const Eigen::MatrixXd inv = m.llt().solve(Eigen::MatrixXd::Identity(3, 3));
      for (Eigen::Index k = 0; k < 3; ++k)
        worst = std::min(worst, inv(k, k) - 1.0 / m(k, k));
    }
    s.add("estimation.posterior.diagonal_inverse_floor", worst >= -1e-12, worst, -1e-12);
  }

  {  // phased-exploration estimator error decays like r/c
    ExperimentConfig cfg = base_config("verify-est-decay", 8512, 300, seed);
    cfg.policy.name = "pege";
    const std::vector<std::int64_t> cs{4, 8, 16, 32, 64, 128};
    const Prior prior = Prior::gaussian_isotropic();
    std::vector<std::vector<double>> errs(std::size_t(cfg.replications),
                                          std::vector<double>(cs.size(), 0.0));
    parallel_for(cfg.replications, [&](std::int64_t i) {
      Rng prior_rng = make_stream(cfg.base_seed, fnv1a64(cfg.experiment_id),
                                  std::uint64_t(i), StreamRole::kPrior);
      const Eigen::VectorXd z = prior.sample(2, prior_rng);
      const TrajectoryRecord rec = run_trajectory(cfg, z, std::uint64_t(i));
      for (const auto& [c, err] : rec.cycle_estimate_error_sq) {
        const auto it = std::find(cs.begin(), cs.end(), c);
        if (it != cs.end()) errs[std::size_t(i)][std::size_t(it - cs.begin())] = err;
      }
    });
    std::vector<double> means(cs.size(), 0.0);
    for (const auto& row : errs)
      for (std::size_t k = 0; k < cs.size(); ++k) means[k] += row[k];
    for (double& m : means) m /= double(cfg.replications);
    const SlopeFit fit = fit_scaling(cs, means);
    double h1 = 0.0;
    for (std::size_t i = 0; i < cs.size(); ++i)
      h1 = std::max(h1, means[i] * double(cs[i]) / 2.0);
    const bool ok = fit.slope >= -1.15 && fit.slope <= -0.85;
    s.add("estimation.pege.estimator_decay_slope", ok, fit.slope, -1.0,
          "window [-1.15, -0.85], fitted h1 = " + std::to_string(h1));
  }

  {  // directional error exceeds the radius with probability at most 1/t^2
    const auto set = std::make_shared<const ArmSet>(
        ArmSet::finite({unit_vec(2, 0), unit_vec(2, 1)}));
    const Eigen::Vector2d z(1.0, 0.3);
    const UncertaintyParams params = derive_uncertainty_params(*set, 1.0, std::nullopt);
    const std::vector<std::int64_t> ts{8, 16, 32};
    const std::int64_t n = 100000;
    std::vector<std::int64_t> exceed(ts.size() * 2, 0);
    std::mutex mu;
    parallel_for(n, [&](std::int64_t i) {
      Rng noise = make_stream(seed, fnv1a64("verify-radius-tail"), std::uint64_t(i),
                              StreamRole::kNoise);
      const BanditInstance inst(set, z, NoiseModel::gaussian(1.0));
      UePolicy ue;
      ue.reset(set, params, 0);
      std::vector<std::int64_t> local(ts.size() * 2, 0);
      for (std::int64_t t = 1; t <= 32; ++t) {
        const Eigen::VectorXd arm = ue.select(t);
        ue.observe(arm, inst.pull(arm, noise));
        const auto it = std::find(ts.begin(), ts.end(), t);
        if (it == ts.end()) continue;
        const std::size_t row = std::size_t(it - ts.begin());
        for (int a = 0; a < 2; ++a) {
          const Eigen::VectorXd u = unit_vec(2, a);
          const double err = u.dot(ue.ols().estimate() - z);
          if (err > uncertainty_radius(ue.ols(), params, u)) ++local[row * 2 + a];
        }
      }
      std::lock_guard lock(mu);
      for (std::size_t k = 0; k < local.size(); ++k) exceed[k] += local[k];
    });
    double worst = -1e300;
    for (std::size_t row = 0; row < ts.size(); ++row) {
      for (int a = 0; a < 2; ++a) {
        const double p = double(exceed[row * 2 + a]) / double(n);
        const double se = std::sqrt(p * (1.0 - p) / double(n));
        const double lim = 1.0 / double(ts[row] * ts[row]);
        worst = std::max(worst, p - lim - 3.0 * se);
      }
    }
    s.add("estimation.radius.tail_probability", worst <= 0.0, worst, 0.0,
          "max over t in {8,16,32} and both arms of p - 1/t^2 - 3 se");
  }
}

// ---------------------------------------------------------------------------

void policies_suite(Suite& s, std::uint64_t seed) {
  Rng rng(derive_key(seed, fnv1a64("verify.policies"), 0, StreamRole::kCheck));

  {  // schedule bookkeeping matches r K + K (K + 1) / 2 for K <= 100
    bool ok = true;
    for (Eigen::Index r : {2, 3}) {
      const auto set = std::make_shared<const ArmSet>(ArmSet::sphere(r));
      const BanditInstance inst(set, unit_vec(r, 0), NoiseModel::gaussian(0.0));
      PegePolicy pege;
      pege.reset(set, UncertaintyParams::theoretical(1.0, 1.0, 1.0, std::nullopt), 0);
      Rng noise(0);
      std::int64_t expected_cycle = 1;
      for (std::int64_t t = 1; t <= PegePolicy::periods_after_cycles(r, 100); ++t) {
        const Eigen::VectorXd arm = pege.select(t);
        pege.observe(arm, inst.pull(arm, noise));
        if (t == PegePolicy::periods_after_cycles(r, expected_cycle)) {
          ok = ok && pege.cycle() == expected_cycle + 1;
          ok = ok && std::int64_t(pege.estimate_history().size()) == expected_cycle;
          ++expected_cycle;
        }
      }
      ok = ok && expected_cycle == 101;
    }
    s.add("policies.pege.schedule_arithmetic", ok, ok ? 1.0 : 0.0, 1.0);
  }

  {  // zero noise: the first estimate is exact and exploitation is optimal
    const auto set = std::make_shared<const ArmSet>(ArmSet::sphere(2));
    const Eigen::Vector2d z(3.0, 4.0);
    const BanditInstance inst(set, z, NoiseModel::gaussian(0.0));
    PegePolicy pege;
    pege.reset(set, UncertaintyParams::theoretical(1.0, 1.0, 1.0, std::nullopt), 0);
    Rng noise(0);
    double worst = 0.0;
    for (std::int64_t t = 1; t <= 50; ++t) {
      const Eigen::VectorXd arm = pege.select(t);
      pege.observe(arm, inst.pull(arm, noise));
      if (t == 3) worst = std::max(worst, (arm - Eigen::Vector2d(0.6, 0.8)).norm());
    }
    for (const auto& [c, zhat] : pege.estimate_history())
      worst = std::max(worst, (zhat - z).norm());
    s.add("policies.pege.zero_noise_recovery", worst <= 1e-12, worst, 1e-12);
  }

  {  // greedy-step regret within a cycle decays like 1/c
    ExperimentConfig cfg = base_config("verify-pege-exploit", 8512, 400, seed);
    cfg.policy.name = "pege";
    const Eigen::Vector2d z(0.6, 0.8);
    const std::vector<std::int64_t> cs{8, 16, 32, 64, 128};
    std::vector<std::vector<double>> regrets(std::size_t(cfg.replications),
                                             std::vector<double>(cs.size(), 0.0));
    parallel_for(cfg.replications, [&](std::int64_t i) {
      const TrajectoryRecord rec = run_trajectory(cfg, z, std::uint64_t(i));
      for (std::size_t k = 0; k < cs.size(); ++k) {
        // first exploitation period of cycle c (1-based)
        const std::int64_t t = PegePolicy::periods_after_cycles(2, cs[k] - 1) + 2 + 1;
        regrets[std::size_t(i)][k] = rec.steps[std::size_t(t - 1)].instant_regret;
      }
    });
    std::vector<double> means(cs.size(), 0.0);
    for (const auto& row : regrets)
      for (std::size_t k = 0; k < cs.size(); ++k) means[k] += row[k];
    for (double& m : means) m /= double(cfg.replications);
    const SlopeFit fit = fit_scaling(cs, means);
    const bool ok = fit.slope >= -1.2 && fit.slope <= -0.8;
    s.add("policies.pege.greedy_regret_decay", ok, fit.slope, -1.0, "window [-1.2, -0.8]");
  }

  {  // index policy always plays an index argmax on finite sets
    const auto set = std::make_shared<const ArmSet>(ArmSet::finite(
        {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(0.7, 0.7)}));
    const Eigen::Vector2d z(1.0, 0.4);
    const BanditInstance inst(set, z, NoiseModel::gaussian(1.0));
    const UncertaintyParams params = derive_uncertainty_params(*set, 1.0, std::nullopt);
    UePolicy ue;
    ue.reset(set, params, 0);
    Rng noise(derive_key(seed, 77, 0, StreamRole::kNoise));
    bool ok = true;
    for (std::int64_t t = 1; t <= 200; ++t) {
      Eigen::VectorXd expected;
      if (t > 2) {
        const double scale = radius_scale(params, ue.ols().count(), 2);
        double best = -1e300;
        for (const auto& u : set->points()) {
          const double val = u.dot(ue.ols().estimate()) +
                             scale * std::sqrt(ue.ols().weighted_norm_sq(u));
          if (val > best) {
            best = val;
            expected = u;
          }
        }
      }
      const Eigen::VectorXd arm = ue.select(t);
      if (t > 2) ok = ok && (arm - expected).norm() == 0.0;
      ue.observe(arm, inst.pull(arm, noise));
    }
    s.add("policies.ue.finite_index_argmax", ok, ok ? 1.0 : 0.0, 1.0);
  }

  {  // weighted-norm step bound and exploration budget: zero violations
    ExperimentConfig sphere_cfg = base_config("verify-ue-budget", 1024, 20, seed);
    sphere_cfg.policy.name = "ue";
    sphere_cfg.policy.alpha_override = 1.0;
    const RegretTable ts = collect_regret(sphere_cfg, std::nullopt, false);
    ExperimentConfig fin_cfg = base_config("verify-ue-budget-finite", 4096, 20, seed);
    fin_cfg.arm_set.kind = "finite";
    fin_cfg.arm_set.vectors = {unit_vec(2, 0), unit_vec(2, 1)};
    fin_cfg.policy.name = "ue";
    const RegretTable tf = collect_regret(fin_cfg, Eigen::Vector2d(1.0, 0.3), false);
    const std::int64_t step_viol = ts.step_norm_violations + tf.step_norm_violations;
    const std::int64_t budget_viol = ts.budget_violations + tf.budget_violations;
    s.add("policies.ue.step_norm_bound", step_viol == 0, double(step_viol), 0.0);
    s.add("policies.ue.exploration_budget", budget_viol == 0, double(budget_viol), 0.0);
  }

  {  // suboptimal-arm pulls respect the finite-arm count bound
    ExperimentConfig cfg = base_config("verify-ue-pulls", 1024, 100, seed);
    cfg.arm_set.kind = "finite";
    cfg.arm_set.vectors = {unit_vec(2, 0), unit_vec(2, 1)};
    cfg.policy.name = "ue";
    const Eigen::Vector2d z(1.0, 0.3);
    std::vector<std::int64_t> counts(std::size_t(cfg.replications), 0);
    parallel_for(cfg.replications, [&](std::int64_t i) {
      const TrajectoryRecord rec = run_trajectory(cfg, z, std::uint64_t(i));
      for (const auto& st : rec.steps)
        if (st.arm(1) == 1.0) ++counts[std::size_t(i)];
    });
    double pulls = 0.0;
    for (const std::int64_t c : counts) pulls += double(c);
    pulls /= double(cfg.replications);
    const UncertaintyParams params = derive_uncertainty_params(
        ArmSet::finite(cfg.arm_set.vectors), 1.0, std::nullopt);
    const double delta = 0.7;
    const double bound = 6.0 + 4.0 * params.alpha * params.alpha * 2.0 *
                                   std::log(1024.0) / (delta * delta);
    s.add("policies.ue.pull_count_bound", pulls <= bound, pulls, bound);
  }

  {  // ucb1 protocol: every arm once, then index argmax; finite sets only
    const auto set = std::make_shared<const ArmSet>(ArmSet::finite(
        {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(-1.0, 0.0)}));
    Ucb1Policy ucb;
    ucb.reset(set, UncertaintyParams::theoretical(1.0, 1.0, 1.0, 3), 0);
    bool ok = true;
    for (std::int64_t t = 1; t <= 3; ++t) {
      const Eigen::VectorXd arm = ucb.select(t);
      ok = ok && (arm - set->points()[std::size_t(t - 1)]).norm() == 0.0;
      ucb.observe(arm, 0.0);
    }
    bool threw = false;
    try {
      Ucb1Policy bad;
      bad.reset(std::make_shared<const ArmSet>(ArmSet::sphere(2)),
                UncertaintyParams::theoretical(1.0, 1.0, 1.0, std::nullopt), 0);
    } catch (const std::invalid_argument&) {
      threw = true;
    }
    s.add("policies.ucb1.protocol", ok && threw, (ok && threw) ? 1.0 : 0.0, 1.0);
  }

  {  // greedy with zero noise locks onto the best arm after initialization
    const auto set = std::make_shared<const ArmSet>(ArmSet::sphere(2));
    const Eigen::Vector2d z(3.0, 4.0);
    const BanditInstance inst(set, z, NoiseModel::gaussian(0.0));
    GreedyPolicy greedy;
    greedy.reset(set, UncertaintyParams::theoretical(1.0, 1.0, 1.0, std::nullopt), 0);
    Rng noise(0);
    double worst = 0.0;
    for (std::int64_t t = 1; t <= 40; ++t) {
      const Eigen::VectorXd arm = greedy.select(t);
      greedy.observe(arm, inst.pull(arm, noise));
      if (t > 2) worst = std::max(worst, (arm - Eigen::Vector2d(0.6, 0.8)).norm());
    }
    s.add("policies.greedy.zero_noise_lock", worst <= 1e-12, worst, 1e-12);
  }

  {  // extreme-point reduction exposes each simplex vertex to the inner policy
    auto wrapper = make_policy("extreme+ucb1");
    const auto set = std::make_shared<const ArmSet>(ArmSet::simplex(3));
    wrapper->reset(set, derive_uncertainty_params(*set, 1.0, std::nullopt), 0);
    bool ok = wrapper->name() == "extreme+ucb1";
    const auto verts = set->extreme_points();
    for (std::int64_t t = 1; t <= 6; ++t) {
      const Eigen::VectorXd arm = wrapper->select(t);
      ok = ok && (arm - verts[std::size_t(t - 1)]).norm() == 0.0;
      wrapper->observe(arm, rng.normal());
    }
    s.add("policies.extreme.vertex_reduction", ok, ok ? 1.0 : 0.0, 1.0);
  }
}

}  // namespace

std::vector<std::string> verify_suite_names() {
  return {"geometry", "environment", "estimation", "policies"};
}

std::vector<CheckResult> run_verify_suite(const std::string& suite, std::uint64_t seed) {
  Suite s;
  if (suite == "geometry")
    geometry_suite(s, seed);
  else if (suite == "environment")
    environment_suite(s, seed);
  else if (suite == "estimation")
    estimation_suite(s, seed);
  else if (suite == "policies")
    policies_suite(s, seed);
  else if (suite == "all")
    for (const auto& name : verify_suite_names()) {
      auto part = run_verify_suite(name, seed);
      s.results.insert(s.results.end(), part.begin(), part.end());
    }
  else
    throw std::invalid_argument("verify: unknown suite: " + suite);
  return s.results;
}

}  // namespace linbandit
