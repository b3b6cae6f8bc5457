#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <sstream>

#include "linbandit/environment.hpp"
#include "linbandit/estimation.hpp"
#include "linbandit/geometry.hpp"
#include "linbandit/harness.hpp"
#include "linbandit/policies.hpp"
#include "linbandit/rng.hpp"
#include "linbandit/verify.hpp"

namespace py = pybind11;
using namespace linbandit;

namespace {

StreamRole role_from_name(const std::string& role) {
  if (role == "prior") return StreamRole::kPrior;
  if (role == "noise") return StreamRole::kNoise;
  if (role == "policy") return StreamRole::kPolicy;
  if (role == "check") return StreamRole::kCheck;
  throw std::invalid_argument("unknown stream role: " + role);
}

// python-side arm sets are value objects; the C++ core shares them by pointer
std::shared_ptr<const ArmSet> shared(const ArmSet& set) {
  return std::make_shared<const ArmSet>(set);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "linearly parameterized bandit core";

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("key"))
      .def("uniform01", &Rng::uniform01)
      .def("uniform", &Rng::uniform, py::arg("lo"), py::arg("hi"))
      .def("normal", &Rng::normal);

  m.def(
      "make_stream",
      [](std::uint64_t base_seed, const std::string& experiment_id, std::uint64_t replication,
         const std::string& role) {
        return make_stream(base_seed, fnv1a64(experiment_id), replication,
                           role_from_name(role));
      },
      py::arg("base_seed"), py::arg("experiment_id"), py::arg("replication"), py::arg("role"),
      "derive the deterministic stream for (seed, experiment, replication, role)");

  py::class_<SpannerArms>(m, "SpannerArms")
      .def_readonly("arms", &SpannerArms::arms)
      .def_readonly("lambda0", &SpannerArms::lambda0);

  py::class_<SbarCheckResult>(m, "SbarCheckResult")
      .def_readonly("pass_", &SbarCheckResult::pass)
      .def_readonly("worst_ratio", &SbarCheckResult::worst_ratio)
      .def_readonly("pairs_checked", &SbarCheckResult::pairs_checked);

  py::class_<ArmSet>(m, "ArmSet")
      .def_static("sphere", &ArmSet::sphere, py::arg("dim"))
      .def_static("ellipsoid", &ArmSet::ellipsoid, py::arg("shape"))
      .def_static("finite", &ArmSet::finite, py::arg("arms"))
      .def_static("polytope", &ArmSet::polytope, py::arg("vertices"))
      .def_static("simplex", &ArmSet::simplex, py::arg("dim"))
      .def_static("hypercube", &ArmSet::hypercube, py::arg("dim"))
      .def_property_readonly("dim", &ArmSet::dim)
      .def("max_norm", &ArmSet::max_norm)
      .def("contains", &ArmSet::contains, py::arg("u"), py::arg("tol") = 1e-9)
      .def("best_arm", &ArmSet::best_arm, py::arg("z"))
      .def("max_reward", &ArmSet::max_reward, py::arg("z"))
      .def("gap", &ArmSet::gap, py::arg("z"), py::arg("u"))
      .def("spanner", &ArmSet::spanner)
      .def("extreme_points", &ArmSet::extreme_points)
      .def("extreme_points_as_finite", &ArmSet::extreme_points_as_finite)
      .def("points", &ArmSet::points)
      .def("shape_matrix", &ArmSet::shape_matrix)
      .def("sbar_constant",
           [](const ArmSet& s) { return s.sbar_constant(); })
      .def("sbar_check", &ArmSet::sbar_check, py::arg("j"), py::arg("n_pairs"), py::arg("seed"))
      .def("describe", &ArmSet::describe)
      .def("__repr__", &ArmSet::describe);

  m.def("spanner_gram_lambda_min", &spanner_gram_lambda_min, py::arg("arms"));

  py::class_<NoiseModel>(m, "NoiseModel")
      .def_static("gaussian", &NoiseModel::gaussian, py::arg("sigma"))
      .def_static("uniform", &NoiseModel::uniform, py::arg("half_width"))
      .def_property_readonly("sigma0", &NoiseModel::sigma0)
      .def("sample", &NoiseModel::sample, py::arg("rng"));

  py::class_<Prior>(m, "Prior")
      .def_static("gaussian_isotropic", &Prior::gaussian_isotropic)
      .def_static("fixed_point", &Prior::fixed_point, py::arg("z"))
      .def_static("iid_gaussian", &Prior::iid_gaussian, py::arg("sigma"))
      .def_static("iid_uniform", &Prior::iid_uniform, py::arg("lo"), py::arg("hi"))
      .def("sample", &Prior::sample, py::arg("dim"), py::arg("rng"));

  py::class_<BanditInstance>(m, "BanditInstance")
      .def(py::init([](const ArmSet& arms, const Eigen::VectorXd& z, const NoiseModel& noise) {
             return BanditInstance(shared(arms), z, noise);
           }),
           py::arg("arms"), py::arg("z"), py::arg("noise"))
      .def("pull", &BanditInstance::pull, py::arg("arm"), py::arg("rng"))
      .def_property_readonly("z", &BanditInstance::z)
      .def_property_readonly("arms", &BanditInstance::arms);

  py::class_<NormBandEstimate>(m, "NormBandEstimate")
      .def_readonly("p_hat", &NormBandEstimate::p_hat)
      .def_readonly("stderr", &NormBandEstimate::stderr_)
      .def_readonly("bound", &NormBandEstimate::bound);

  m.def("norm_band_probability", &norm_band_probability, py::arg("theta"), py::arg("beta"),
        py::arg("dim"), py::arg("n_samples"), py::arg("rng"));

  py::class_<OlsState>(m, "OlsState")
      .def_static("init", &OlsState::init, py::arg("arms"), py::arg("rewards"))
      .def("update", &OlsState::update, py::arg("arm"), py::arg("reward"))
      .def_property_readonly("count", &OlsState::count)
      .def_property_readonly("dim", &OlsState::dim)
      .def_property_readonly("estimate", &OlsState::estimate)
      .def_property_readonly("gram", &OlsState::gram)
      .def_property_readonly("gram_inverse", &OlsState::gram_inverse)
      .def_property_readonly("log_det_gram", &OlsState::log_det_gram)
      .def("weighted_norm_sq", &OlsState::weighted_norm_sq, py::arg("u"));

  py::class_<UncertaintyParams>(m, "UncertaintyParams")
      .def_static("theoretical", &UncertaintyParams::theoretical, py::arg("sigma0"),
                  py::arg("u_bar"), py::arg("lambda0"), py::arg("arm_count"))
      .def("with_alpha", &UncertaintyParams::with_alpha, py::arg("alpha"))
      .def_readonly("sigma0", &UncertaintyParams::sigma0)
      .def_readonly("u_bar", &UncertaintyParams::u_bar)
      .def_readonly("lambda0", &UncertaintyParams::lambda0)
      .def_readonly("kappa0", &UncertaintyParams::kappa0)
      .def_readonly("alpha", &UncertaintyParams::alpha)
      .def_readonly("alpha_overridden", &UncertaintyParams::alpha_overridden)
      .def_readonly("arm_count", &UncertaintyParams::arm_count);

  m.def("radius_scale", &radius_scale, py::arg("params"), py::arg("t"), py::arg("dim"));
  m.def("uncertainty_radius", &uncertainty_radius, py::arg("state"), py::arg("params"),
        py::arg("u"));
  m.def(
      "derive_uncertainty_params",
      [](const ArmSet& set, double sigma0, std::optional<double> alpha_override) {
        return derive_uncertainty_params(set, sigma0, alpha_override);
      },
      py::arg("arm_set"), py::arg("sigma0"), py::arg("alpha_override") = std::nullopt);

  py::class_<GaussianPosterior>(m, "GaussianPosterior")
      .def_static("isotropic_prior", &GaussianPosterior::isotropic_prior, py::arg("dim"))
      .def("update", &GaussianPosterior::update, py::arg("arm"), py::arg("reward"),
           py::arg("noise_var"))
      .def_readonly("mean", &GaussianPosterior::mean)
      .def_readonly("covariance", &GaussianPosterior::covariance);

  py::class_<DirectionalRisk>(m, "DirectionalRisk")
      .def_readonly("exploration", &DirectionalRisk::exploration)
      .def_readonly("variance", &DirectionalRisk::variance)
      .def_readonly("sq_error", &DirectionalRisk::sq_error);

  m.def("directional_risk_terms", &directional_risk_terms, py::arg("arms"),
        py::arg("posterior"), py::arg("z"));

  py::class_<StepInfo>(m, "StepInfo")
      .def_readonly("weighted_norm_sq", &StepInfo::weighted_norm_sq)
      .def_readonly("radius", &StepInfo::radius);

  py::class_<Policy>(m, "Policy")
      .def(
          "reset",
          [](Policy& p, const ArmSet& arms, const UncertaintyParams& params,
             std::uint64_t seed) { p.reset(shared(arms), params, seed); },
          py::arg("arms"), py::arg("params"), py::arg("seed"))
      .def("select", &Policy::select, py::arg("t"))
      .def("observe", &Policy::observe, py::arg("arm"), py::arg("reward"))
      .def_property_readonly("name", &Policy::name)
      .def("last_step_info", &Policy::last_step_info);

  m.def("make_policy", &make_policy, py::arg("name"));
  m.def("periods_after_cycles", &PegePolicy::periods_after_cycles, py::arg("dim"),
        py::arg("cycles"));

  py::class_<TrajectoryStep>(m, "TrajectoryStep")
      .def_readonly("arm", &TrajectoryStep::arm)
      .def_readonly("reward", &TrajectoryStep::reward)
      .def_readonly("instant_regret", &TrajectoryStep::instant_regret)
      .def_readonly("weighted_norm_sq", &TrajectoryStep::weighted_norm_sq)
      .def_readonly("radius", &TrajectoryStep::radius);

  py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("replication", &TrajectoryRecord::replication)
      .def_readonly("z", &TrajectoryRecord::z)
      .def_readonly("steps", &TrajectoryRecord::steps)
      .def_readonly("checkpoints", &TrajectoryRecord::checkpoints)
      .def_readonly("cumulative_regret", &TrajectoryRecord::cumulative_regret)
      .def_readonly("cycle_estimate_error_sq", &TrajectoryRecord::cycle_estimate_error_sq)
      .def_readonly("step_norm_violations", &TrajectoryRecord::step_norm_violations)
      .def_readonly("budget_violations", &TrajectoryRecord::budget_violations);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_static(
          "from_json",
          [](const std::string& text) {
            return ExperimentConfig::from_json(nlohmann::json::parse(text));
          },
          py::arg("text"))
      .def_static("load", &ExperimentConfig::load, py::arg("path"))
      .def("to_json", [](const ExperimentConfig& c) { return c.to_json().dump(2); })
      .def("validate", &ExperimentConfig::validate)
      .def("checkpoint_grid", &ExperimentConfig::checkpoint_grid)
      .def_readwrite("experiment_id", &ExperimentConfig::experiment_id)
      .def_readwrite("horizon", &ExperimentConfig::horizon)
      .def_readwrite("replications", &ExperimentConfig::replications)
      .def_readwrite("base_seed", &ExperimentConfig::base_seed)
      .def_readwrite("checkpoints", &ExperimentConfig::checkpoints);

  py::class_<SlopeFit>(m, "SlopeFit")
      .def_readonly("slope", &SlopeFit::slope)
      .def_readonly("stderr", &SlopeFit::stderr_)
      .def_readonly("ci95_half", &SlopeFit::ci95_half)
      .def_readonly("intercept", &SlopeFit::intercept);

  m.def("fit_scaling", &fit_scaling, py::arg("ts"), py::arg("values"));
  m.def("default_checkpoints", &default_checkpoints, py::arg("horizon"));

  py::class_<CheckpointStat>(m, "CheckpointStat")
      .def_readonly("t", &CheckpointStat::t)
      .def_readonly("mean", &CheckpointStat::mean)
      .def_readonly("stderr", &CheckpointStat::stderr_)
      .def_readonly("ci95_half", &CheckpointStat::ci95_half);

  py::class_<SummaryStats>(m, "SummaryStats")
      .def_readonly("policy", &SummaryStats::policy)
      .def_readonly("dim", &SummaryStats::dim)
      .def_readonly("replications", &SummaryStats::replications)
      .def_readonly("checkpoints", &SummaryStats::checkpoints)
      .def_readonly("slope", &SummaryStats::slope)
      .def_readonly("step_norm_violations", &SummaryStats::step_norm_violations)
      .def_readonly("budget_violations", &SummaryStats::budget_violations)
      .def("__repr__", [](const SummaryStats& s) {
        std::ostringstream out;
        write_summary(out, s);
        return out.str();
      });

  py::class_<RegretTable>(m, "RegretTable")
      .def_readonly("checkpoints", &RegretTable::checkpoints)
      .def_readonly("rows", &RegretTable::rows)
      .def_readonly("step_norm_violations", &RegretTable::step_norm_violations)
      .def_readonly("budget_violations", &RegretTable::budget_violations);

  m.def("run_trajectory", &run_trajectory, py::arg("config"), py::arg("z"),
        py::arg("replication"));
  m.def(
      "collect_regret",
      [](const ExperimentConfig& config, const std::optional<Eigen::VectorXd>& fixed_z,
         bool keep_records) { return collect_regret(config, fixed_z, keep_records); },
      py::arg("config"), py::arg("fixed_z") = std::nullopt, py::arg("keep_records") = false);
  m.def("estimate_regret", &estimate_regret, py::arg("config"), py::arg("z"));
  m.def("estimate_bayes_risk", &estimate_bayes_risk, py::arg("config"));
  m.def("summarize", &summarize, py::arg("config"), py::arg("table"));
  m.def(
      "regret_csv",
      [](const ExperimentConfig& config, const RegretTable& table) {
        std::ostringstream out;
        write_regret_csv(out, config, table);
        return out.str();
      },
      py::arg("config"), py::arg("table"));
  m.def(
      "summary_text",
      [](const SummaryStats& stats) {
        std::ostringstream out;
        write_summary(out, stats);
        return out.str();
      },
      py::arg("stats"));
  m.def("worker_count", &worker_count);

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("pass_", &CheckResult::pass)
      .def_readonly("measured", &CheckResult::measured)
      .def_readonly("bound", &CheckResult::bound)
      .def_readonly("note", &CheckResult::note);

  m.def("verify_suite_names", &verify_suite_names);
  m.def("run_verify_suite", &run_verify_suite, py::arg("suite"), py::arg("seed"));
}
