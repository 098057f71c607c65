#include "transport/diagnostics.hpp"

#include <cmath>
#include <cstdio>

#include "transport/errors.hpp"

namespace transport {

double weight_mean_ratio(const StudyDataset& data,
                         const Eigen::VectorXd& p_hat) {
  if (p_hat.size() != data.n())
    throw DimensionMismatch("p_hat must have one entry per unit");
  const Eigen::Index n_target = data.n_target();
  if (n_target == 0) throw NoTargetUnits("no non-participants");
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (data.s[i] != 1) continue;
    const double p = p_hat[i];
    if (!(p > 0.0 && p < 1.0))
      throw NonpositiveProbability(
          "participation probability outside (0,1) for a participant");
    total += (1.0 - p) / p;
  }
  return total / static_cast<double>(n_target);
}

std::vector<BalanceRow> balance_table(const StudyDataset& data,
                                      const WeightSet& weights) {
  if (weights.w.size() != data.n())
    throw DimensionMismatch("weights must have one entry per unit");
  const int code = data.arm_code(weights.arm);
  if (code < 0)
    throw InvalidArgument("unknown treatment arm '" + weights.arm + "'");
  const Eigen::Index n = data.n();
  const Eigen::Index n_target = data.n_target();
  if (n_target == 0) throw NoTargetUnits("no non-participants");

  std::vector<BalanceRow> rows;
  rows.reserve(data.covariate_names.size());
  for (std::size_t j = 0; j < data.covariate_names.size(); ++j) {
    const Eigen::VectorXd col = data.x.col(static_cast<Eigen::Index>(j));
    BalanceRow row;
    row.covariate = data.covariate_names[j];

    const double combined_mean = col.mean();
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      ss += (col[i] - combined_mean) * (col[i] - combined_mean);
    if (n < 2 || ss <= 0.0)
      throw ZeroVariance("covariate '" + row.covariate +
                         "' is constant; balance undefined");
    row.pooled_sd = std::sqrt(ss / static_cast<double>(n - 1));

    double target_total = 0.0, arm_total = 0.0, arm_weighted = 0.0,
           weight_total = 0.0;
    Eigen::Index arm_count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (data.s[i] == 0) target_total += col[i];
      if (data.s[i] == 1 && data.arm[i] == code) {
        arm_total += col[i];
        arm_weighted += weights.w[i] * col[i];
        weight_total += weights.w[i];
        ++arm_count;
      }
    }
    if (arm_count == 0)
      throw OneClassOnly("arm '" + weights.arm + "' has no participants");
    if (weight_total <= 0.0)
      throw ZeroWeightSum("arm '" + weights.arm + "' has zero weight sum");

    row.target_mean = target_total / static_cast<double>(n_target);
    row.arm_mean_unweighted = arm_total / static_cast<double>(arm_count);
    row.arm_mean_weighted = arm_weighted / weight_total;
    row.smd_unweighted = (row.arm_mean_unweighted - row.target_mean) / row.pooled_sd;
    row.smd_weighted = (row.arm_mean_weighted - row.target_mean) / row.pooled_sd;
    rows.push_back(std::move(row));
  }
  return rows;
}

OverlapSummary overlap_summary(const Eigen::VectorXd& p_hat,
                               const Eigen::ArrayXi& s, double threshold) {
  if (p_hat.size() != s.size())
    throw DimensionMismatch("p_hat and s must have equal length");
  std::vector<double> trial, target;
  Eigen::Index low = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] == 1) {
      trial.push_back(p_hat[i]);
    } else {
      target.push_back(p_hat[i]);
      if (p_hat[i] < threshold) ++low;
    }
  }
  if (trial.empty() || target.empty())
    throw InvalidArgument("both participation groups must be nonempty");
  OverlapSummary out;
  out.trial = summarize(trial);
  out.target = summarize(target);
  out.low_p_hat_count = low;
  out.threshold = threshold;
  return out;
}

std::string p_hat_histogram_csv(const Eigen::VectorXd& p_hat,
                                const Eigen::ArrayXi& s, int bins) {
  if (p_hat.size() != s.size())
    throw DimensionMismatch("p_hat and s must have equal length");
  if (bins < 1) throw InvalidArgument("need at least one histogram bin");
  std::vector<long> trial(bins, 0), target(bins, 0);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double p = p_hat[i];
    if (!(p >= 0.0 && p <= 1.0))
      throw InvalidArgument("probabilities must lie in [0,1]");
    int b = static_cast<int>(p * bins);
    if (b == bins) b = bins - 1;  // p == 1 goes to the last bin
    (s[i] == 1 ? trial : target)[static_cast<std::size_t>(b)]++;
  }
  std::string out = "group,bin_lower,bin_upper,count\n";
  char line[128];
  for (int pass = 0; pass < 2; ++pass) {
    const char* group = pass == 0 ? "trial" : "non_participants";
    const auto& counts = pass == 0 ? trial : target;
    for (int b = 0; b < bins; ++b) {
      std::snprintf(line, sizeof(line), "%s,%.10g,%.10g,%ld\n", group,
                    static_cast<double>(b) / bins,
                    static_cast<double>(b + 1) / bins, counts[b]);
      out += line;
    }
  }
  return out;
}

}  // namespace transport
