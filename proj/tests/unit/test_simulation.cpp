#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "transport/errors.hpp"
#include "transport/simulation.hpp"
#include "transport/stats.hpp"

using namespace transport;

namespace {

// Independent check of the participation fraction: Simpson's rule over the
// one-dimensional reduction E[expit(b0 + sigma Z)], Z standard normal.
double participation_fraction(double b0, double sigma) {
  const int steps = 4800;
  const double lo = -12.0, hi = 12.0;
  const double h = (hi - lo) / steps;
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double z = lo + h * i;
    const double f = expit(b0 + sigma * z) * std::exp(-0.5 * z * z);
    sum += f * (i == 0 || i == steps ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return sum * h / 3.0 / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

TEST_CASE("participation intercept solve matches quadrature oracles") {
  const Eigen::Vector3d zero(0.0, 0.0, 0.0);
  CHECK(solve_participation_intercept(0.2, zero) ==
        doctest::Approx(logit(0.2)).epsilon(1e-8));

  const Eigen::Vector3d ones(1.0, 1.0, 1.0);
  CHECK(solve_participation_intercept(0.5, ones) ==
        doctest::Approx(0.0).epsilon(1e-8));

  const double b0 = solve_participation_intercept(0.25, ones);
  CHECK(participation_fraction(b0, std::sqrt(3.0)) ==
        doctest::Approx(0.25).epsilon(1e-6));

  const Eigen::Vector3d mixed(0.5, -0.3, 1.2);
  const double b0m = solve_participation_intercept(0.1, mixed);
  CHECK(participation_fraction(b0m, mixed.norm()) ==
        doctest::Approx(0.1).epsilon(1e-6));

  CHECK(solve_participation_intercept(0.7, ones) >
        solve_participation_intercept(0.3, ones));
}

TEST_CASE("generated cohorts are internally consistent") {
  ScenarioConfig sc;
  sc.seed = 4;
  const SimulatedCohort cohort = generate_cohort_full(sc, 0);
  const StudyDataset& d = cohort.data;

  REQUIRE(d.n() == sc.n);
  CHECK(d.covariate_names == std::vector<std::string>{"x1", "x2", "x3"});
  CHECK(d.treatment_labels == std::vector<std::string>{"0", "1"});
  CHECK(d.design_kind == DesignKind::nested);
  REQUIRE(cohort.y1.size() == sc.n);

  Eigen::Index arm1 = 0;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    REQUIRE((d.s[i] == 0 || d.s[i] == 1));
    if (d.s[i] == 0) {
      CHECK(d.arm[i] == -1);
      CHECK(std::isnan(d.y[i]));
    } else {
      REQUIRE((d.arm[i] == 0 || d.arm[i] == 1));
      CHECK(d.y[i] == (d.arm[i] == 1 ? cohort.y1[i] : cohort.y0[i]));
      arm1 += d.arm[i];
    }
  }
  // Expected participant count is the scenario target; randomization is 1:1.
  CHECK(std::abs(double(d.n_trial()) - sc.target_n_trial) < 100.0);
  CHECK(std::abs(double(2 * arm1 - d.n_trial())) < 100.0);

  // Same replicate index reproduces the cohort; a different one does not.
  const StudyDataset again = generate_cohort(sc, 0);
  CHECK((again.x - d.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((again.s == d.s).all());
  CHECK((again.arm == d.arm).all());
  for (Eigen::Index i = 0; i < d.n(); ++i)
    if (d.s[i] == 1) CHECK(again.y[i] == d.y[i]);
  const StudyDataset other = generate_cohort(sc, 1);
  CHECK((other.x - d.x).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("binary scenarios emit 0/1 outcomes") {
  ScenarioConfig sc;
  sc.outcome_kind = OutcomeKind::binary;
  sc.theta1 = Eigen::Vector4d(0.5, 0.4, 0.3, 0.2);
  sc.theta0 = Eigen::Vector4d(-0.5, 0.4, 0.3, 0.2);
  sc.seed = 6;
  const SimulatedCohort cohort = generate_cohort_full(sc, 2);
  CHECK(cohort.data.outcome_kind == OutcomeKind::binary);
  for (Eigen::Index i = 0; i < cohort.data.n(); ++i) {
    CHECK((cohort.y1[i] == 0.0 || cohort.y1[i] == 1.0));
    if (cohort.data.s[i] == 1)
      CHECK((cohort.data.y[i] == 0.0 || cohort.data.y[i] == 1.0));
  }
}

TEST_CASE("oracle truth matches a closed form and an independent draw") {
  ScenarioConfig sc;  // treatment shifts the intercept only
  CHECK(oracle_truth(sc, 200000) == doctest::Approx(1.0).epsilon(1e-12));

  ScenarioConfig noisy = sc;
  noisy.error_sd = 5.0;  // irrelevant to the noise-free truth
  CHECK(oracle_truth(noisy, 200000) ==
        doctest::Approx(oracle_truth(sc, 200000)).epsilon(1e-14));

  // Effect modification by x1: truth is 1 + E[x1 | non-participant], which
  // is below one when selection favors large x1.  Check against a separate
  // Monte Carlo draw with its own generator.
  ScenarioConfig modified = sc;
  modified.theta1 = Eigen::Vector4d(1.0, 2.0, 1.0, 1.0);
  const double truth = oracle_truth(modified, 1000000);
  CHECK(truth < 1.0);

  const double b0 = solve_participation_intercept(0.5, modified.beta);
  std::mt19937_64 rng(987654321);
  std::normal_distribution<double> normal(0.0, 1.0);
  double wsum = 0.0, wx1 = 0.0;
  for (int i = 0; i < 400000; ++i) {
    const double x1 = normal(rng), x2 = normal(rng), x3 = normal(rng);
    const double q = 1.0 - expit(b0 + x1 + x2 + x3);
    wsum += q;
    wx1 += q * x1;
  }
  CHECK(truth == doctest::Approx(1.0 + wx1 / wsum).epsilon(0.02));
}

TEST_CASE("scenario runs are thread-invariant and bookkeeping adds up") {
  ScenarioConfig sc;
  sc.n = 300;
  sc.target_n_trial = 150;
  sc.replications = 24;
  sc.seed = 5;

  RunOptions serial;
  serial.threads = 1;
  serial.truth_override = 0.0;
  const SimulationSummary one = run_scenario(sc, serial);

  RunOptions parallel = serial;
  parallel.threads = 4;
  const SimulationSummary four = run_scenario(sc, parallel);

  CHECK(one.truth == 0.0);
  CHECK(one.replicates_used + one.failures + one.degenerate == 24);
  CHECK(one.mean_n_trial == doctest::Approx(150.0).epsilon(0.2));
  for (std::size_t e = 0; e < kEstimatorCount; ++e) {
    CHECK(one.performance[e].bias == four.performance[e].bias);
    CHECK(one.performance[e].variance == four.performance[e].variance);
    // truth was overridden to zero, so bias equals the mean estimate
    CHECK(one.performance[e].bias == one.performance[e].mean_estimate);
    CHECK(std::abs(one.performance[e].bias) < 2.0);
  }

  sc.replications = 0;
  CHECK_THROWS_AS(run_scenario(sc, serial), InvalidArgument);
}

TEST_CASE("factorial grid expands every combination once") {
  ScenarioGrid grid;
  const std::vector<ScenarioConfig> scenarios = expand_grid(grid);
  REQUIRE(scenarios.size() == 36);

  std::set<std::tuple<double, int, double, double>> combos;
  std::set<std::uint64_t> seeds;
  for (const ScenarioConfig& sc : scenarios) {
    combos.insert({sc.target_n_trial, sc.n, sc.beta[0], sc.theta1[1]});
    seeds.insert(sc.seed);
    CHECK(sc.beta[1] == 1.0);
    CHECK(sc.beta[2] == 1.0);
    CHECK((sc.theta0 - Eigen::Vector4d(0.0, 1.0, 1.0, 1.0)).norm() == 0.0);
    CHECK(sc.replications == grid.replications);
  }
  CHECK(combos.size() == 36);
  CHECK(seeds.size() == 36);

  ScenarioGrid empty = grid;
  empty.beta1.clear();
  CHECK_THROWS_AS(expand_grid(empty), InvalidArgument);
}

TEST_CASE("summary CSV layout") {
  SimulationSummary s;
  s.scenario.target_n_trial = 200;
  s.scenario.n = 2000;
  s.scenario.beta = Eigen::Vector3d(0.5, 1.0, 1.0);
  s.scenario.theta1 = Eigen::Vector4d(1.0, 2.0, 1.0, 1.0);
  s.scenario.theta0 = Eigen::Vector4d(0.0, 1.0, 1.0, 1.0);
  s.replicates_used = 100;
  for (std::size_t e = 0; e < kEstimatorCount; ++e)
    s.performance[e] = EstimatorPerformance{0.5, 0.5, 0.25, 0.05};

  const std::string csv = summary_csv({s});
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line ==
        "n_rct_target,n,beta1,theta_diff,estimator,bias,variance,mc_se_bias,"
        "replicates");

  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  REQUIRE(rows.size() == kEstimatorCount);
  CHECK(rows.front() == "200,2000,0.5,1,trial,0.5,0.25,0.05,100");
  CHECK(rows.back() == "200,2000,0.5,1,dr3,0.5,0.25,0.05,100");
}
