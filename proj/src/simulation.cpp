#include "transport/simulation.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "transport/errors.hpp"
#include "transport/parallel.hpp"
#include "transport/rng.hpp"
#include "transport/stats.hpp"

namespace transport {

namespace {

// Substream index reserved for the truth oracle; replicates use 0..R-1.
constexpr std::uint64_t kTruthStream = 0xffffffffffffffffULL;

struct GaussHermite {
  Eigen::VectorXd nodes, weights;
};

// 64-node rule for weight exp(-t^2), from the eigendecomposition of the
// Jacobi matrix of the Hermite recurrence.
const GaussHermite& gauss_hermite_64() {
  static const GaussHermite rule = [] {
    const int m = 64;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(m, m);
    for (int i = 1; i < m; ++i) {
      const double b = std::sqrt(i / 2.0);
      jacobi(i, i - 1) = jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    GaussHermite r;
    r.nodes = es.eigenvalues();
    r.weights.resize(m);
    const double mu0 = std::sqrt(std::numbers::pi);
    for (int i = 0; i < m; ++i) {
      const double v = es.eigenvectors()(0, i);
      r.weights[i] = mu0 * v * v;
    }
    return r;
  }();
  return rule;
}

// E[expit(b0 + sigma Z)] for Z standard normal.
double mean_participation(double b0, double sigma) {
  const GaussHermite& gh = gauss_hermite_64();
  double total = 0.0;
  for (Eigen::Index i = 0; i < gh.nodes.size(); ++i)
    total += gh.weights[i] *
             expit(b0 + sigma * std::numbers::sqrt2 * gh.nodes[i]);
  return total / std::sqrt(std::numbers::pi);
}

double dot4(const Eigen::Vector4d& theta, double x1, double x2, double x3) {
  return theta[0] + theta[1] * x1 + theta[2] * x2 + theta[3] * x3;
}

}  // namespace

double solve_participation_intercept(double target_fraction,
                                     const Eigen::Vector3d& beta) {
  if (!(target_fraction > 0.0 && target_fraction < 1.0))
    throw InvalidArgument("target participation fraction must be in (0,1)");
  const double sigma = beta.norm();
  double lo = -50.0, hi = 50.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = mean_participation(mid, sigma) - target_fraction;
    if (std::abs(f) < 1e-10) return mid;
    (f < 0.0 ? lo : hi) = mid;
  }
  throw NotConverged("participation intercept bisection did not converge");
}

SimulatedCohort generate_cohort_full(const ScenarioConfig& sc,
                                     std::uint64_t replicate) {
  if (sc.n < 2) throw InvalidArgument("cohort size must be at least 2");
  if (!(sc.target_n_trial > 0.0 && sc.target_n_trial < sc.n))
    throw InvalidArgument("target trial size must be in (0, n)");
  const double b0 =
      solve_participation_intercept(sc.target_n_trial / sc.n, sc.beta);

  auto gen = make_stream(sc.seed, replicate);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  SimulatedCohort out;
  StudyDataset& d = out.data;
  d.s.resize(sc.n);
  d.arm.resize(sc.n);
  d.y.resize(sc.n);
  d.x.resize(sc.n, 3);
  d.covariate_names = {"x1", "x2", "x3"};
  d.treatment_labels = {"0", "1"};
  d.design_kind = DesignKind::nested;
  d.outcome_kind = sc.outcome_kind;
  out.y1.resize(sc.n);
  out.y0.resize(sc.n);
  out.participation_intercept = b0;

  const bool binary = sc.outcome_kind == OutcomeKind::binary;
  Eigen::Index n_trial = 0;
  for (int i = 0; i < sc.n; ++i) {
    const double x1 = normal(gen), x2 = normal(gen), x3 = normal(gen);
    d.x(i, 0) = x1;
    d.x(i, 1) = x2;
    d.x(i, 2) = x3;
    const double p = expit(b0 + sc.beta[0] * x1 + sc.beta[1] * x2 +
                           sc.beta[2] * x3);
    const bool s = uniform(gen) < p;
    d.s[i] = s ? 1 : 0;
    const double eta1 = dot4(sc.theta1, x1, x2, x3);
    const double eta0 = dot4(sc.theta0, x1, x2, x3);
    if (binary) {
      const double u1 = uniform(gen), u0 = uniform(gen);
      out.y1[i] = u1 < expit(eta1) ? 1.0 : 0.0;
      out.y0[i] = u0 < expit(eta0) ? 1.0 : 0.0;
    } else {
      out.y1[i] = eta1 + sc.error_sd * normal(gen);
      out.y0[i] = eta0 + sc.error_sd * normal(gen);
    }
    if (s) {
      const bool a1 = uniform(gen) < 0.5;
      d.arm[i] = a1 ? 1 : 0;
      d.y[i] = a1 ? out.y1[i] : out.y0[i];
      ++n_trial;
    } else {
      d.arm[i] = -1;
      d.y[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  if (n_trial == 0 || n_trial == sc.n)
    throw DegenerateCohort("all units on one side of trial participation");
  return out;
}

StudyDataset generate_cohort(const ScenarioConfig& sc,
                             std::uint64_t replicate) {
  return generate_cohort_full(sc, replicate).data;
}

double oracle_truth(const ScenarioConfig& sc, Eigen::Index draws) {
  if (draws < 1) throw InvalidArgument("need at least one auxiliary draw");
  const double b0 =
      solve_participation_intercept(sc.target_n_trial / sc.n, sc.beta);
  auto gen = make_stream(sc.seed, kTruthStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const bool binary = sc.outcome_kind == OutcomeKind::binary;
  double sum_x1 = 0, sum_x2 = 0, sum_x3 = 0, sum_diff = 0;
  Eigen::Index n_target = 0;
  for (Eigen::Index i = 0; i < draws; ++i) {
    const double x1 = normal(gen), x2 = normal(gen), x3 = normal(gen);
    const double p = expit(b0 + sc.beta[0] * x1 + sc.beta[1] * x2 +
                           sc.beta[2] * x3);
    if (uniform(gen) < p) continue;  // keep non-participants only
    ++n_target;
    if (binary) {
      sum_diff += expit(dot4(sc.theta1, x1, x2, x3)) -
                  expit(dot4(sc.theta0, x1, x2, x3));
    } else {
      sum_x1 += x1;
      sum_x2 += x2;
      sum_x3 += x3;
    }
  }
  if (n_target == 0)
    throw DegenerateCohort("auxiliary draw produced no non-participants");
  const double m = static_cast<double>(n_target);
  if (binary) return sum_diff / m;
  const Eigen::Vector4d delta = sc.theta1 - sc.theta0;
  return delta[0] + delta[1] * sum_x1 / m + delta[2] * sum_x2 / m +
         delta[3] * sum_x3 / m;
}

AnalysisConfig default_scenario_analysis() {
  AnalysisConfig config;
  config.participation.terms = {MainEffect{"x1"}, MainEffect{"x2"},
                                MainEffect{"x3"}};
  config.treatment.terms = {};  // intercept-only: ~1:1 randomization
  config.outcome.terms = {MainEffect{"x1"}, MainEffect{"x2"},
                          MainEffect{"x3"}};
  config.arms = {"0", "1"};
  config.contrasts = {{"1", "0"}};
  return config;
}

SimulationSummary run_scenario(const ScenarioConfig& sc,
                               const RunOptions& options) {
  if (sc.replications < 1)
    throw InvalidArgument("scenario needs at least one replication");
  SimulationSummary out;
  out.scenario = sc;
  out.truth = options.truth_override
                  ? *options.truth_override
                  : oracle_truth(sc, options.truth_draws);
  const AnalysisConfig analysis =
      options.analysis ? *options.analysis : default_scenario_analysis();

  const int R = sc.replications;
  std::vector<std::optional<EstimatorValues>> diffs(
      static_cast<std::size_t>(R));
  std::vector<double> realized_n_trial(static_cast<std::size_t>(R), 0.0);
  std::atomic<int> degenerate{0}, failures{0};

  parallel_for(R, options.threads, [&](int r) {
    try {
      const StudyDataset cohort =
          generate_cohort(sc, static_cast<std::uint64_t>(r));
      const PreparedAnalysis prepared = prepare_analysis(cohort, analysis);
      const PointEstimates estimates = point_estimates(prepared);
      diffs[static_cast<std::size_t>(r)] = estimates.difference.at(0);
      realized_n_trial[static_cast<std::size_t>(r)] =
          static_cast<double>(cohort.n_trial());
    } catch (const DegenerateCohort&) {
      degenerate.fetch_add(1);
    } catch (const Error&) {
      failures.fetch_add(1);
    }
  });

  out.degenerate = degenerate.load();
  out.failures = failures.load();
  if (out.degenerate > 0.001 * R)
    throw TooManyFailures(std::to_string(out.degenerate) + " of " +
                          std::to_string(R) + " cohorts degenerate");

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(R));
  for (std::size_t e = 0; e < kEstimatorCount; ++e) {
    values.clear();
    for (const auto& diff : diffs)
      if (diff) values.push_back((*diff)[e]);
    if (values.empty())
      throw TooManyFailures("all replicates failed");
    EstimatorPerformance& perf = out.performance[e];
    perf.mean_estimate = mean(values);
    perf.bias = perf.mean_estimate - out.truth;
    perf.variance = values.size() > 1 ? sample_variance(values) : 0.0;
    perf.mc_se_bias =
        std::sqrt(perf.variance / static_cast<double>(values.size()));
    out.replicates_used = static_cast<int>(values.size());
  }

  double n_trial_total = 0.0;
  int n_trial_count = 0;
  for (std::size_t r = 0; r < diffs.size(); ++r)
    if (diffs[r]) {
      n_trial_total += realized_n_trial[r];
      ++n_trial_count;
    }
  out.mean_n_trial = n_trial_count > 0 ? n_trial_total / n_trial_count : 0.0;
  return out;
}

std::vector<ScenarioConfig> expand_grid(const ScenarioGrid& grid) {
  if (grid.target_n_trial.empty() || grid.n.empty() || grid.beta1.empty() ||
      grid.theta1_x1.empty())
    throw InvalidArgument("every grid dimension needs at least one value");
  std::vector<ScenarioConfig> scenarios;
  std::uint64_t index = 0;
  for (double target : grid.target_n_trial)
    for (int n : grid.n)
      for (double beta1 : grid.beta1)
        for (double theta1_x1 : grid.theta1_x1) {
          ScenarioConfig sc;
          sc.n = n;
          sc.target_n_trial = target;
          sc.beta = Eigen::Vector3d(beta1, grid.beta2, grid.beta3);
          sc.theta1 = Eigen::Vector4d(1.0, theta1_x1, 1.0, 1.0);
          sc.theta0 = Eigen::Vector4d(0.0, 1.0, 1.0, 1.0);
          sc.outcome_kind = grid.outcome_kind;
          sc.error_sd = grid.error_sd;
          sc.replications = grid.replications;
          sc.seed = substream_seed(grid.seed, index++);
          scenarios.push_back(sc);
        }
  return scenarios;
}

std::vector<SimulationSummary> run_factorial(const ScenarioGrid& grid,
                                             const RunOptions& options) {
  std::vector<SimulationSummary> summaries;
  for (const ScenarioConfig& sc : expand_grid(grid))
    summaries.push_back(run_scenario(sc, options));
  return summaries;
}

std::string summary_csv(const std::vector<SimulationSummary>& summaries) {
  std::string out =
      "n_rct_target,n,beta1,theta_diff,estimator,bias,variance,mc_se_bias,"
      "replicates\n";
  char line[256];
  for (const SimulationSummary& s : summaries) {
    const double theta_diff = s.scenario.theta1[1] - s.scenario.theta0[1];
    for (Estimator e : kEstimators) {
      const EstimatorPerformance& perf = s.performance[index_of(e)];
      std::snprintf(line, sizeof(line),
                    "%g,%d,%g,%g,%s,%.10g,%.10g,%.10g,%d\n",
                    s.scenario.target_n_trial, s.scenario.n,
                    s.scenario.beta[0], theta_diff, estimator_name(e),
                    perf.bias, perf.variance, perf.mc_se_bias,
                    s.replicates_used);
      out += line;
    }
  }
  return out;
}

}  // namespace transport
