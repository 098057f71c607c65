#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "transport/analysis.hpp"
#include "transport/dataset.hpp"

namespace transport {

// One benchmark scenario: three independent standard-normal covariates,
// logistic selection into the trial with the intercept solved so the expected
// participant count matches target_n_trial, 1:1 randomization among
// participants, and a per-arm outcome model that is linear in the covariates
// (continuous outcomes add N(0, error_sd) noise; binary outcomes pass the
// linear predictor through the inverse logit).
struct ScenarioConfig {
  int n = 2000;
  double target_n_trial = 1000;
  Eigen::Vector3d beta{1.0, 1.0, 1.0};          // selection slopes
  Eigen::Vector4d theta1{1.0, 1.0, 1.0, 1.0};   // arm "1": intercept + slopes
  Eigen::Vector4d theta0{0.0, 1.0, 1.0, 1.0};   // arm "0"
  OutcomeKind outcome_kind = OutcomeKind::continuous;
  double error_sd = 1.0;
  int replications = 2000;
  std::uint64_t seed = 0;
};

// Intercept b0 with E[expit(b0 + beta'X)] = target_fraction for X standard
// normal, evaluated by 64-node Gauss-Hermite quadrature and solved by
// bisection to |f| < 1e-10.
double solve_participation_intercept(double target_fraction,
                                     const Eigen::Vector3d& beta);

// One generated cohort plus the potential outcomes the generator used, so
// consistency (y == the assigned arm's potential outcome) is checkable.
struct SimulatedCohort {
  StudyDataset data;
  Eigen::VectorXd y1, y0;  // potential outcomes for every unit
  double participation_intercept = 0.0;
};

SimulatedCohort generate_cohort_full(const ScenarioConfig& scenario,
                                     std::uint64_t replicate);
StudyDataset generate_cohort(const ScenarioConfig& scenario,
                             std::uint64_t replicate);

// True average treatment effect among non-participants, evaluated on a large
// auxiliary draw.  Continuous outcomes use the closed-form effect applied to
// the realized non-participant covariate means; binary outcomes average the
// difference of conditional means.
double oracle_truth(const ScenarioConfig& scenario,
                    Eigen::Index draws = 1000000);

// Main-effects specs for all three models and the ("1","0") contrast —
// correctly specified for this generator.
AnalysisConfig default_scenario_analysis();

struct EstimatorPerformance {
  double mean_estimate = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double mc_se_bias = 0.0;
};

struct SimulationSummary {
  ScenarioConfig scenario;
  double truth = 0.0;
  int replicates_used = 0;
  int degenerate = 0;  // cohorts with all units on one side of participation
  int failures = 0;    // replicates lost to estimation errors
  double mean_n_trial = 0.0;
  std::array<EstimatorPerformance, kEstimatorCount> performance;
};

struct RunOptions {
  int threads = 0;
  std::optional<double> truth_override;
  std::optional<AnalysisConfig> analysis;  // default: correctly specified
  Eigen::Index truth_draws = 1000000;
};

// Bias/variance of the treatment-effect difference for each estimator over
// scenario.replications generated cohorts.
SimulationSummary run_scenario(const ScenarioConfig& scenario,
                               const RunOptions& options = RunOptions());

// Factorial grid over trial size, cohort size, the first selection slope and
// the arm-1 slope on the first covariate (the effect modifier).
struct ScenarioGrid {
  std::vector<double> target_n_trial{200, 500, 1000};
  std::vector<int> n{2000, 5000, 10000};
  std::vector<double> beta1{0.0, 1.0};
  std::vector<double> theta1_x1{1.0, 2.0};
  double beta2 = 1.0;
  double beta3 = 1.0;
  OutcomeKind outcome_kind = OutcomeKind::continuous;
  double error_sd = 1.0;
  int replications = 2000;
  std::uint64_t seed = 0;
};

std::vector<ScenarioConfig> expand_grid(const ScenarioGrid& grid);
std::vector<SimulationSummary> run_factorial(
    const ScenarioGrid& grid, const RunOptions& options = RunOptions());

// One CSV row per (scenario, estimator): n_rct_target, n, beta1, theta_diff,
// estimator, bias, variance, mc_se_bias, replicates.
std::string summary_csv(const std::vector<SimulationSummary>& summaries);

}  // namespace transport
