#include "linbandit/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace linbandit {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  require(j.is_array(), "config: expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(Eigen::Index(i)) = j[i].get<double>();
  return v;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  require(j.is_array() && !j.empty(), "config: expected an array of rows");
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].size() == cols, "config: ragged matrix");
    for (std::size_t k = 0; k < cols; ++k) m(Eigen::Index(i), Eigen::Index(k)) = j[i][k].get<double>();
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i)));
  return rows;
}

// fixed-precision, locale-independent float formatting so identical runs
// produce byte-identical files
std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// specs

ArmSet ArmSetSpec::build() const {
  if (kind == "sphere") return ArmSet::sphere(dim);
  if (kind == "ellipsoid") return ArmSet::ellipsoid(shape);
  if (kind == "finite") return ArmSet::finite(vectors);
  if (kind == "polytope") return ArmSet::polytope(vectors);
  if (kind == "simplex") return ArmSet::simplex(dim);
  if (kind == "hypercube") return ArmSet::hypercube(dim);
  throw std::invalid_argument("config: unknown arm set kind: " + kind);
}

ArmSetSpec ArmSetSpec::from_json(const nlohmann::json& j) {
  ArmSetSpec s;
  s.kind = j.at("kind").get<std::string>();
  if (j.contains("dim")) s.dim = j.at("dim").get<Eigen::Index>();
  if (j.contains("shape")) s.shape = matrix_from_json(j.at("shape"));
  if (s.kind == "ellipsoid") s.dim = s.shape.rows();
  if (j.contains("vectors")) {
    for (const auto& row : j.at("vectors")) s.vectors.push_back(vector_from_json(row));
    if (!s.vectors.empty()) s.dim = s.vectors.front().size();
  }
  return s;
}

nlohmann::json ArmSetSpec::to_json() const {
  nlohmann::json j{{"kind", kind}};
  if (kind == "sphere" || kind == "simplex" || kind == "hypercube") j["dim"] = dim;
  if (kind == "ellipsoid") j["shape"] = matrix_to_json(shape);
  if (kind == "finite" || kind == "polytope") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& v : vectors) rows.push_back(vector_to_json(v));
    j["vectors"] = rows;
  }
  return j;
}

Prior PriorSpec::build() const {
  if (kind == "gaussian_isotropic") return Prior::gaussian_isotropic();
  if (kind == "fixed") return Prior::fixed_point(point);
  if (kind == "iid_gaussian") return Prior::iid_gaussian(a);
  if (kind == "iid_uniform") return Prior::iid_uniform(a, b);
  throw std::invalid_argument("config: unknown prior kind: " + kind);
}

PriorSpec PriorSpec::from_json(const nlohmann::json& j) {
  PriorSpec s;
  s.kind = j.at("kind").get<std::string>();
  if (j.contains("z")) s.point = vector_from_json(j.at("z"));
  if (j.contains("sigma")) s.a = j.at("sigma").get<double>();
  if (j.contains("low")) s.a = j.at("low").get<double>();
  if (j.contains("high")) s.b = j.at("high").get<double>();
  return s;
}

nlohmann::json PriorSpec::to_json() const {
  nlohmann::json j{{"kind", kind}};
  if (kind == "fixed") j["z"] = vector_to_json(point);
  if (kind == "iid_gaussian") j["sigma"] = a;
  if (kind == "iid_uniform") {
    j["low"] = a;
    j["high"] = b;
  }
  return j;
}

NoiseModel NoiseSpec::build() const {
  if (kind == "gaussian") return NoiseModel::gaussian(param);
  if (kind == "uniform") return NoiseModel::uniform(param);
  throw std::invalid_argument("config: unknown noise kind: " + kind);
}

NoiseSpec NoiseSpec::from_json(const nlohmann::json& j) {
  NoiseSpec s;
  s.kind = j.at("kind").get<std::string>();
  if (j.contains("sigma")) s.param = j.at("sigma").get<double>();
  if (j.contains("half_width")) s.param = j.at("half_width").get<double>();
  return s;
}

nlohmann::json NoiseSpec::to_json() const {
  nlohmann::json j{{"kind", kind}};
  if (kind == "gaussian") j["sigma"] = param;
  if (kind == "uniform") j["half_width"] = param;
  return j;
}

PolicySpec PolicySpec::from_json(const nlohmann::json& j) {
  PolicySpec s;
  s.name = j.at("name").get<std::string>();
  if (j.contains("alpha_override")) s.alpha_override = j.at("alpha_override").get<double>();
  return s;
}

nlohmann::json PolicySpec::to_json() const {
  nlohmann::json j{{"name", name}};
  if (alpha_override) j["alpha_override"] = *alpha_override;
  return j;
}

void ExperimentConfig::validate() const {
  const ArmSet set = arm_set.build();
  require(horizon >= std::int64_t(set.dim()) + 1,
          "config: horizon must be at least dim + 1");
  require(replications >= 1, "config: replications must be >= 1");
  make_policy(policy.name);  // throws on unknown names
  prior.build();
  noise.build();
  if (prior.kind == "fixed")
    require(prior.point.size() == set.dim(), "config: fixed z has wrong dimension");
  for (std::int64_t c : checkpoints)
    require(c >= 1 && c <= horizon, "config: checkpoints must lie in [1, horizon]");
}

std::vector<std::int64_t> default_checkpoints(std::int64_t horizon) {
  std::vector<std::int64_t> out;
  for (std::int64_t t = 1; t <= horizon; t *= 2) out.push_back(t);
  if (out.back() != horizon) out.push_back(horizon);
  return out;
}

std::vector<std::int64_t> ExperimentConfig::checkpoint_grid() const {
  if (checkpoints.empty()) return default_checkpoints(horizon);
  std::vector<std::int64_t> out = checkpoints;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (j.contains("experiment_id")) c.experiment_id = j.at("experiment_id").get<std::string>();
  c.arm_set = ArmSetSpec::from_json(j.at("arm_set"));
  if (j.contains("prior")) c.prior = PriorSpec::from_json(j.at("prior"));
  if (j.contains("noise")) c.noise = NoiseSpec::from_json(j.at("noise"));
  c.policy = PolicySpec::from_json(j.at("policy"));
  c.horizon = j.at("horizon").get<std::int64_t>();
  if (j.contains("checkpoints"))
    c.checkpoints = j.at("checkpoints").get<std::vector<std::int64_t>>();
  if (j.contains("replications")) c.replications = j.at("replications").get<std::int64_t>();
  if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment_id"] = experiment_id;
  j["arm_set"] = arm_set.to_json();
  j["prior"] = prior.to_json();
  j["noise"] = noise.to_json();
  j["policy"] = policy.to_json();
  j["horizon"] = horizon;
  if (!checkpoints.empty()) j["checkpoints"] = checkpoints;
  j["replications"] = replications;
  j["base_seed"] = base_seed;
  if (!output.empty()) j["output"] = output;
  return j;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

// ---------------------------------------------------------------------------
// scaling fit

SlopeFit fit_scaling(const std::vector<std::int64_t>& ts, const std::vector<double>& values) {
  require(ts.size() == values.size(), "fit_scaling: length mismatch");
  require(ts.size() >= 4, "fit_scaling: need at least 4 points");
  const std::size_t n = ts.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(ts[i] > 0, "fit_scaling: nonpositive t");
    require(values[i] > 0.0, "fit_scaling: nonpositive value");
    x[i] = std::log(double(ts[i]));
    y[i] = std::log(values[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "fit_scaling: degenerate t grid");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double resid = y[i] - (f.intercept + f.slope * x[i]);
    rss += resid * resid;
  }
  f.stderr_ = std::sqrt(rss / double(n - 2) / sxx);
  f.ci95_half = 1.96 * f.stderr_;
  return f;
}

// ---------------------------------------------------------------------------
// trajectory

UncertaintyParams derive_uncertainty_params(const ArmSet& set, double sigma0,
                                            std::optional<double> alpha_override) {
  std::optional<std::int64_t> count;
  if (set.is_finite()) count = std::int64_t(set.points().size());
  UncertaintyParams p =
      UncertaintyParams::theoretical(sigma0, set.max_norm(), set.spanner().lambda0, count);
  if (alpha_override) p = p.with_alpha(*alpha_override);
  return p;
}

TrajectoryRecord run_trajectory(const ExperimentConfig& config, const Eigen::VectorXd& z,
                                std::uint64_t replication) {
  const auto set = std::make_shared<const ArmSet>(config.arm_set.build());
  require(z.size() == set->dim(), "run_trajectory: z has wrong dimension");
  const NoiseModel noise = config.noise.build();
  const BanditInstance instance(set, z, noise);
  const std::uint64_t exp_hash = fnv1a64(config.experiment_id);

  auto policy = make_policy(config.policy.name);
  policy->reset(set, derive_uncertainty_params(*set, noise.sigma0(), config.policy.alpha_override),
                derive_key(config.base_seed, exp_hash, replication, StreamRole::kPolicy));
  Rng noise_rng = make_stream(config.base_seed, exp_hash, replication, StreamRole::kNoise);

  const std::vector<std::int64_t> grid = config.checkpoint_grid();
  const double max_reward = set->max_reward(z);

  // runtime bounds for the index policy's weighted norms
  const UncertaintyParams invariant_params =
      derive_uncertainty_params(*set, noise.sigma0(), std::nullopt);
  const double step_bound =
      invariant_params.u_bar * invariant_params.u_bar / invariant_params.lambda0;
  const double c0 = std::max(1.0, step_bound);
  const double r = double(set->dim());

  TrajectoryRecord rec;
  rec.replication = replication;
  rec.z = z;
  rec.steps.reserve(std::size_t(config.horizon));
  rec.checkpoints = grid;
  rec.cumulative_regret.resize(grid.size(), 0.0);

  double cum = 0.0;
  double budget = 0.0;
  std::size_t next_cp = 0;
  auto* pege = dynamic_cast<PegePolicy*>(policy.get());
  std::size_t estimates_seen = 0;

  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    Eigen::VectorXd arm = policy->select(t);
    const double reward = instance.pull(arm, noise_rng);
    policy->observe(arm, reward);

    double inst = max_reward - arm.dot(z);
    if (inst < 0.0) {
      require(inst > -1e-7, "run_trajectory: negative regret beyond tolerance");
      inst = 0.0;
    }
    cum += inst;

    const StepInfo info = policy->last_step_info();
    if (std::isfinite(info.weighted_norm_sq)) {
      if (info.weighted_norm_sq > step_bound * (1.0 + 1e-9)) ++rec.step_norm_violations;
      budget += info.weighted_norm_sq;
      const double budget_bound =
          2.0 * c0 * (r * std::log(c0) + (r + 1.0) * std::log(double(t) + 1.0));
      if (budget > budget_bound * (1.0 + 1e-9)) ++rec.budget_violations;
    }

    rec.steps.push_back({std::move(arm), reward, inst, info.weighted_norm_sq, info.radius});
    while (next_cp < grid.size() && grid[next_cp] == t) {
      rec.cumulative_regret[next_cp] = cum;
      ++next_cp;
    }

    if (pege != nullptr) {
      const auto& hist = pege->estimate_history();
      for (; estimates_seen < hist.size(); ++estimates_seen) {
        const auto& [c, zhat] = hist[estimates_seen];
        rec.cycle_estimate_error_sq.emplace_back(c, (zhat - z).squaredNorm());
      }
    }
  }
  return rec;
}

// ---------------------------------------------------------------------------
// parallel monte carlo

int worker_count() {
  if (const char* env = std::getenv("LINBANDIT_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body) {
  const int workers = std::min<std::int64_t>(worker_count(), n) > 0
                          ? int(std::min<std::int64_t>(worker_count(), n))
                          : 1;
  if (workers <= 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next(0);
  std::exception_ptr error;
  std::mutex error_mutex;
  auto drain = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

RegretTable collect_regret(const ExperimentConfig& config,
                           const std::optional<Eigen::VectorXd>& fixed_z, bool keep_records) {
  config.validate();
  const ArmSet set = config.arm_set.build();
  const Prior prior = config.prior.build();
  const std::uint64_t exp_hash = fnv1a64(config.experiment_id);

  RegretTable table;
  table.checkpoints = config.checkpoint_grid();
  table.rows.resize(std::size_t(config.replications));
  if (keep_records) table.records.resize(std::size_t(config.replications));
  std::vector<std::array<std::int64_t, 2>> violations(std::size_t(config.replications));

  parallel_for(config.replications, [&](std::int64_t i) {
    Eigen::VectorXd z;
    if (fixed_z) {
      z = *fixed_z;
    } else {
      Rng prior_rng =
          make_stream(config.base_seed, exp_hash, std::uint64_t(i), StreamRole::kPrior);
      z = prior.sample(set.dim(), prior_rng);
    }
    TrajectoryRecord rec = run_trajectory(config, z, std::uint64_t(i));
    table.rows[std::size_t(i)] = rec.cumulative_regret;
    violations[std::size_t(i)] = {rec.step_norm_violations, rec.budget_violations};
    if (keep_records) table.records[std::size_t(i)] = std::move(rec);
  });
  for (const auto& v : violations) {
    table.step_norm_violations += v[0];
    table.budget_violations += v[1];
  }
  return table;
}

SummaryStats summarize(const ExperimentConfig& config, const RegretTable& table) {
  SummaryStats s;
  s.policy = config.policy.name;
  s.dim = config.arm_set.build().dim();
  s.replications = std::int64_t(table.rows.size());
  const std::size_t m = table.checkpoints.size();
  const double n = double(table.rows.size());
  for (std::size_t k = 0; k < m; ++k) {
    double mean = 0.0;
    for (const auto& row : table.rows) mean += row[k];
    mean /= n;
    double var = 0.0;
    if (table.rows.size() >= 2) {
      for (const auto& row : table.rows) var += (row[k] - mean) * (row[k] - mean);
      var /= (n - 1.0);
    }
    CheckpointStat cp;
    cp.t = table.checkpoints[k];
    cp.mean = mean;
    cp.stderr_ = std::sqrt(var / n);
    cp.ci95_half = 1.96 * cp.stderr_;
    s.checkpoints.push_back(cp);
  }
  s.step_norm_violations = table.step_norm_violations;
  s.budget_violations = table.budget_violations;
  if (m >= 4) {
    bool positive = true;
    std::vector<std::int64_t> ts;
    std::vector<double> means;
    for (const auto& cp : s.checkpoints) {
      if (cp.mean <= 0.0) positive = false;
      ts.push_back(cp.t);
      means.push_back(cp.mean);
    }
    if (positive) s.slope = fit_scaling(ts, means);
  }
  return s;
}

SummaryStats estimate_regret(const ExperimentConfig& config, const Eigen::VectorXd& z) {
  return summarize(config, collect_regret(config, z, false));
}

SummaryStats estimate_bayes_risk(const ExperimentConfig& config) {
  return summarize(config, collect_regret(config, std::nullopt, false));
}

// ---------------------------------------------------------------------------
// serialization

void write_regret_csv(std::ostream& out, const ExperimentConfig& config,
                      const RegretTable& table) {
  out << "policy,r,T_checkpoint,replication,cumulative_regret\n";
  const Eigen::Index dim = config.arm_set.build().dim();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t k = 0; k < table.checkpoints.size(); ++k) {
      out << config.policy.name << ',' << dim << ',' << table.checkpoints[k] << ',' << i << ','
          << format_double(table.rows[i][k]) << '\n';
    }
  }
}

void write_summary(std::ostream& out, const SummaryStats& stats) {
  out << "policy=" << stats.policy << '\n';
  out << "r=" << stats.dim << '\n';
  out << "replications=" << stats.replications << '\n';
  for (const auto& cp : stats.checkpoints) {
    out << "checkpoint." << cp.t << ".mean=" << format_double(cp.mean) << '\n';
    out << "checkpoint." << cp.t << ".stderr=" << format_double(cp.stderr_) << '\n';
    out << "checkpoint." << cp.t << ".ci95_half=" << format_double(cp.ci95_half) << '\n';
  }
  if (stats.slope) {
    out << "slope=" << format_double(stats.slope->slope) << '\n';
    out << "slope_stderr=" << format_double(stats.slope->stderr_) << '\n';
    out << "slope_ci95_half=" << format_double(stats.slope->ci95_half) << '\n';
  }
  out << "step_norm_violations=" << stats.step_norm_violations << '\n';
  out << "budget_violations=" << stats.budget_violations << '\n';
}

std::vector<SummaryStats> summarize_csv(std::istream& in) {
  std::string line;
  require(bool(std::getline(in, line)), "report: empty CSV");
  require(line == "policy,r,T_checkpoint,replication,cumulative_regret",
          "report: unrecognized CSV header");
  struct Key {
    std::string policy;
    Eigen::Index dim;
    bool operator<(const Key& o) const {
      return std::tie(policy, dim) < std::tie(o.policy, o.dim);
    }
  };
  std::map<Key, std::map<std::int64_t, std::vector<double>>> groups;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string policy, rs, ts, reps, val;
    require(bool(std::getline(ss, policy, ',')) && bool(std::getline(ss, rs, ',')) &&
                bool(std::getline(ss, ts, ',')) && bool(std::getline(ss, reps, ',')) &&
                bool(std::getline(ss, val, ',')),
            "report: malformed CSV row");
    groups[{policy, Eigen::Index(std::stoll(rs))}][std::stoll(ts)].push_back(std::stod(val));
  }
  std::vector<SummaryStats> out;
  for (const auto& [key, by_t] : groups) {
    SummaryStats s;
    s.policy = key.policy;
    s.dim = key.dim;
    std::vector<std::int64_t> ts;
    std::vector<double> means;
    bool positive = true;
    for (const auto& [t, vals] : by_t) {
      const double n = double(vals.size());
      s.replications = std::int64_t(vals.size());
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= n;
      double var = 0.0;
      if (vals.size() >= 2) {
        for (double v : vals) var += (v - mean) * (v - mean);
        var /= (n - 1.0);
      }
      CheckpointStat cp;
      cp.t = t;
      cp.mean = mean;
      cp.stderr_ = std::sqrt(var / n);
      cp.ci95_half = 1.96 * cp.stderr_;
      s.checkpoints.push_back(cp);
      ts.push_back(t);
      means.push_back(mean);
      if (mean <= 0.0) positive = false;
    }
    if (ts.size() >= 4 && positive) s.slope = fit_scaling(ts, means);
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// sweep

SweepSpec SweepSpec::from_json(const nlohmann::json& j) {
  SweepSpec s;
  s.base = ExperimentConfig::from_json(j.at("base"));
  if (j.contains("dims"))
    for (const auto& d : j.at("dims")) s.dims.push_back(d.get<Eigen::Index>());
  if (j.contains("horizons"))
    for (const auto& h : j.at("horizons")) s.horizons.push_back(h.get<std::int64_t>());
  if (j.contains("policies"))
    for (const auto& p : j.at("policies")) s.policies.push_back(PolicySpec::from_json(p));
  return s;
}

SweepSpec SweepSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("sweep: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

std::vector<ExperimentConfig> SweepSpec::expand() const {
  std::vector<Eigen::Index> dims = this->dims;
  if (dims.empty()) dims.push_back(base.arm_set.dim);
  std::vector<std::int64_t> horizons = this->horizons;
  if (horizons.empty()) horizons.push_back(base.horizon);
  std::vector<PolicySpec> policies = this->policies;
  if (policies.empty()) policies.push_back(base.policy);

  const bool resizable = base.arm_set.kind == "sphere" || base.arm_set.kind == "simplex" ||
                         base.arm_set.kind == "hypercube";
  std::vector<ExperimentConfig> out;
  for (const Eigen::Index d : dims) {
    require(resizable || d == base.arm_set.dim,
            "sweep: dims grid requires a sphere/simplex/hypercube arm set");
    for (const std::int64_t h : horizons) {
      for (const PolicySpec& p : policies) {
        ExperimentConfig c = base;
        c.arm_set.dim = d;
        c.horizon = h;
        c.policy = p;
        std::ostringstream id;
        id << base.experiment_id << "-" << p.name << "-r" << d << "-T" << h;
        c.experiment_id = id.str();
        if (!base.output.empty()) {
          std::ostringstream path;
          path << base.output << "-" << p.name << "-r" << d << "-T" << h;
          c.output = path.str();
        }
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

}  // namespace linbandit
