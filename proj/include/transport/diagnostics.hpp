#pragma once

#include <optional>
#include <string>
#include <vector>

#include "transport/estimators.hpp"
#include "transport/stats.hpp"

namespace transport {

// Convergence record for one nuisance fit, kept in the diagnostics report.
struct ModelDiagnostics {
  std::string model;  // e.g. "participation", "outcome:surgery"
  bool converged = false;
  int iterations = 0;
  double max_score_residual = 0.0;
  bool separation_suspected = false;
};

struct BalanceRow {
  std::string covariate;
  double target_mean = 0.0;          // unweighted mean among non-participants
  double arm_mean_unweighted = 0.0;  // unweighted mean among the arm's units
  double arm_mean_weighted = 0.0;    // weighted by the inverse-odds weights
  double pooled_sd = 0.0;            // unweighted SD over the combined sample
  double smd_unweighted = 0.0;
  double smd_weighted = 0.0;
};

struct ArmDiagnostics {
  std::string arm;
  QuantileSummary weight_summary;  // positive weights (arm participants)
  double weight_sum = 0.0;
  Eigen::Index positive_weights = 0;
  std::optional<double> truncation_cutoff;
  std::vector<BalanceRow> balance;
};

struct Diagnostics {
  // Mean inverse participation odds among participants over the
  // non-participant count; close to 1 when the participation model fits.
  double weight_mean_ratio = 0.0;
  QuantileSummary p_hat_trial;   // participation probability among s=1
  QuantileSummary p_hat_target;  // among s=0
  Eigen::Index low_p_hat_count = 0;  // s=0 units with p_hat below threshold
  double positivity_threshold = 1e-3;
  bool positivity_warning = false;
  std::vector<ArmDiagnostics> arms;
  std::vector<ModelDiagnostics> models;
};

// Mean of (1-p)/p over participants, divided by the non-participant count.
double weight_mean_ratio(const StudyDataset& data, const Eigen::VectorXd& p_hat);

// Standardized mean differences between the (weighted) arm sample and the
// unweighted non-participant sample, one row per dataset covariate.  The
// denominator is the unweighted SD over the combined sample.
std::vector<BalanceRow> balance_table(const StudyDataset& data,
                                      const WeightSet& weights);

struct OverlapSummary {
  QuantileSummary trial;
  QuantileSummary target;
  Eigen::Index low_p_hat_count = 0;
  double threshold = 1e-3;
};

// Participation-probability quantiles per group plus the count of
// non-participants below the positivity threshold.
OverlapSummary overlap_summary(const Eigen::VectorXd& p_hat,
                               const Eigen::ArrayXi& s,
                               double threshold = 1e-3);

// Histogram of fitted participation probabilities per group, 50 equal-width
// bins over [0,1], as CSV (group,bin_lower,bin_upper,count).
std::string p_hat_histogram_csv(const Eigen::VectorXd& p_hat,
                                const Eigen::ArrayXi& s, int bins = 50);

}  // namespace transport
