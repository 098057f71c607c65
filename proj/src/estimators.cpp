#include "transport/estimators.hpp"

#include <cmath>

#include "transport/errors.hpp"
#include "transport/stats.hpp"

namespace transport {

namespace {

int resolve_arm(const StudyDataset& data, const std::string& arm) {
  const int code = data.arm_code(arm);
  if (code < 0) throw InvalidArgument("unknown treatment arm '" + arm + "'");
  return code;
}

Eigen::Index require_target(const StudyDataset& data) {
  const Eigen::Index n_target = data.n_target();
  if (n_target == 0) throw NoTargetUnits("no non-participants to transport to");
  return n_target;
}

void check_aligned(const StudyDataset& data, const Eigen::VectorXd& v,
                   const char* what) {
  if (v.size() != data.n())
    throw DimensionMismatch(std::string(what) + " must have one entry per unit");
}

}  // namespace

const char* estimator_name(Estimator e) {
  switch (e) {
    case Estimator::trial: return "trial";
    case Estimator::om: return "om";
    case Estimator::iow1: return "iow1";
    case Estimator::iow2: return "iow2";
    case Estimator::dr1: return "dr1";
    case Estimator::dr2: return "dr2";
    case Estimator::dr3: return "dr3";
  }
  return "?";
}

std::optional<Estimator> estimator_from_name(const std::string& name) {
  for (Estimator e : kEstimators)
    if (name == estimator_name(e)) return e;
  return std::nullopt;
}

ParticipationFit estimate_participation(const StudyDataset& data,
                                        const ModelSpec& spec, KnotBank& bank,
                                        const GlmOptions& options,
                                        double positivity_threshold) {
  const DesignMatrix design = build_design(data, spec, bank);
  const Eigen::VectorXd response = data.s.cast<double>();
  ParticipationFit out;
  out.model = fit_logistic(design.x, response, Eigen::VectorXd(), options);
  out.p_hat = out.model.predict(design.x);
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if (data.s[i] == 0 && out.p_hat[i] < positivity_threshold) {
      out.positivity_warning = true;
      break;
    }
  return out;
}

TreatmentFit estimate_treatment_prob(const StudyDataset& data,
                                     const std::string& arm,
                                     const ModelSpec& spec, KnotBank& bank,
                                     std::optional<double> known,
                                     const GlmOptions& options) {
  TreatmentFit out;
  if (known) {
    if (!(*known > 0.0 && *known < 1.0))
      throw InvalidArgument("known treatment probability must be in (0,1)");
    out.e_hat = Eigen::VectorXd::Constant(data.n(), *known);
    return out;
  }
  const int code = resolve_arm(data, arm);
  const DesignMatrix design = build_design(data, spec, bank);

  std::vector<Eigen::Index> trial_rows;
  trial_rows.reserve(static_cast<std::size_t>(data.n_trial()));
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if (data.s[i] == 1) trial_rows.push_back(i);
  if (trial_rows.empty()) throw OneClassOnly("no trial participants");

  Eigen::MatrixXd sub(trial_rows.size(), design.x.cols());
  Eigen::VectorXd indicator(trial_rows.size());
  bool any_on = false, any_off = false;
  for (std::size_t r = 0; r < trial_rows.size(); ++r) {
    sub.row(r) = design.x.row(trial_rows[r]);
    const bool on = data.arm[trial_rows[r]] == code;
    indicator[r] = on ? 1.0 : 0.0;
    any_on = any_on || on;
    any_off = any_off || !on;
  }
  if (!any_on)
    throw OneClassOnly("arm '" + arm + "' has no participants");
  if (!any_off)
    throw OneClassOnly("all participants are in arm '" + arm + "'");
  out.model = fit_logistic(sub, indicator, Eigen::VectorXd(), options);
  out.e_hat = out.model->predict(design.x);
  return out;
}

WeightSet compute_weights(const StudyDataset& data,
                          const Eigen::VectorXd& p_hat,
                          const Eigen::VectorXd& e_hat,
                          const std::string& arm) {
  check_aligned(data, p_hat, "p_hat");
  check_aligned(data, e_hat, "e_hat");
  const int code = resolve_arm(data, arm);

  WeightSet out;
  out.arm = arm;
  out.p_hat = p_hat;
  out.e_hat = e_hat;
  out.w = Eigen::VectorXd::Zero(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (data.s[i] != 1 || data.arm[i] != code) continue;
    const double p = p_hat[i];
    const double e = e_hat[i];
    if (!(p > 0.0))
      throw NonpositiveProbability("participation probability <= 0 at row " +
                                   std::to_string(i));
    if (p > 1.0)
      throw InvalidArgument("participation probability > 1 at row " +
                            std::to_string(i));
    if (!(e > 0.0))
      throw NonpositiveProbability("treatment probability <= 0 at row " +
                                   std::to_string(i));
    if (e >= 1.0 + 1e-12)
      throw InvalidArgument("treatment probability >= 1 at row " +
                            std::to_string(i));
    out.w[i] = (1.0 - p) / (p * e);
  }
  out.sum = out.w.sum();
  return out;
}

WeightSet truncate_weights(const WeightSet& weights, double quantile) {
  if (!(quantile > 0.0 && quantile <= 1.0))
    throw InvalidArgument("truncation quantile must be in (0, 1]");
  std::vector<double> positive;
  for (Eigen::Index i = 0; i < weights.w.size(); ++i)
    if (weights.w[i] > 0.0) positive.push_back(weights.w[i]);
  if (positive.empty()) return weights;
  std::sort(positive.begin(), positive.end());
  const double cutoff = quantile_sorted(positive, quantile);
  WeightSet out = weights;
  for (Eigen::Index i = 0; i < out.w.size(); ++i)
    out.w[i] = std::min(out.w[i], cutoff);
  out.sum = out.w.sum();
  out.truncation_cutoff = cutoff;
  return out;
}

double trial_only(const StudyDataset& data, const std::string& arm) {
  const int code = resolve_arm(data, arm);
  double total = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if (data.s[i] == 1 && data.arm[i] == code) {
      total += data.y[i];
      ++count;
    }
  if (count == 0) throw OneClassOnly("arm '" + arm + "' has no participants");
  return total / static_cast<double>(count);
}

double mu_om(const StudyDataset& data, const Eigen::VectorXd& g_hat) {
  check_aligned(data, g_hat, "g_hat");
  const Eigen::Index n_target = require_target(data);
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if (data.s[i] == 0) total += g_hat[i];
  return total / static_cast<double>(n_target);
}

double mu_iow1(const StudyDataset& data, const WeightSet& weights) {
  check_aligned(data, weights.w, "weights");
  const Eigen::Index n_target = require_target(data);
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if (weights.w[i] > 0.0) total += weights.w[i] * data.y[i];
  return total / static_cast<double>(n_target);
}

double mu_iow2(const StudyDataset& data, const WeightSet& weights) {
  check_aligned(data, weights.w, "weights");
  double total = 0.0, wsum = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if (weights.w[i] > 0.0) {
      total += weights.w[i] * data.y[i];
      wsum += weights.w[i];
    }
  if (wsum <= 0.0)
    throw ZeroWeightSum("arm '" + weights.arm + "' has zero weight sum");
  return total / wsum;
}

double mu_dr1(const StudyDataset& data, const WeightSet& weights,
              const Eigen::VectorXd& g_hat) {
  check_aligned(data, weights.w, "weights");
  check_aligned(data, g_hat, "g_hat");
  const Eigen::Index n_target = require_target(data);
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (weights.w[i] > 0.0) total += weights.w[i] * (data.y[i] - g_hat[i]);
    if (data.s[i] == 0) total += g_hat[i];
  }
  return total / static_cast<double>(n_target);
}

double mu_dr2(const StudyDataset& data, const WeightSet& weights,
              const Eigen::VectorXd& g_hat) {
  check_aligned(data, weights.w, "weights");
  check_aligned(data, g_hat, "g_hat");
  const Eigen::Index n_target = require_target(data);
  double residual_total = 0.0, wsum = 0.0, target_total = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (weights.w[i] > 0.0) {
      residual_total += weights.w[i] * (data.y[i] - g_hat[i]);
      wsum += weights.w[i];
    }
    if (data.s[i] == 0) target_total += g_hat[i];
  }
  if (wsum <= 0.0)
    throw ZeroWeightSum("arm '" + weights.arm + "' has zero weight sum");
  return residual_total / wsum + target_total / static_cast<double>(n_target);
}

double mu_dr3_design(const StudyDataset& data, const WeightSet& weights,
                     const Eigen::MatrixXd& outcome_design,
                     const GlmOptions& options, FittedGlm* fitted) {
  check_aligned(data, weights.w, "weights");
  if (outcome_design.rows() != data.n())
    throw DimensionMismatch("outcome design must cover all units");
  require_target(data);
  const int code = resolve_arm(data, weights.arm);

  std::vector<Eigen::Index> arm_rows;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if (data.s[i] == 1 && data.arm[i] == code) arm_rows.push_back(i);
  if (arm_rows.empty())
    throw OneClassOnly("arm '" + weights.arm + "' has no participants");

  Eigen::MatrixXd sub(arm_rows.size(), outcome_design.cols());
  Eigen::VectorXd y_sub(arm_rows.size()), w_sub(arm_rows.size());
  for (std::size_t r = 0; r < arm_rows.size(); ++r) {
    sub.row(r) = outcome_design.row(arm_rows[r]);
    y_sub[r] = data.y[arm_rows[r]];
    w_sub[r] = weights.w[arm_rows[r]];
  }
  const FittedGlm fit = data.outcome_kind == OutcomeKind::binary
                            ? fit_logistic(sub, y_sub, w_sub, options)
                            : fit_linear(sub, y_sub, w_sub);
  if (fitted) *fitted = fit;
  return mu_om(data, fit.predict(outcome_design));
}

double mu_dr3(const StudyDataset& data, const WeightSet& weights,
              const ModelSpec& spec, KnotBank& bank,
              const GlmOptions& options) {
  const DesignMatrix design = build_design(data, spec, bank);
  return mu_dr3_design(data, weights, design.x, options);
}

Contrast contrast(double mu_a, double mu_reference) {
  Contrast out;
  out.difference = mu_a - mu_reference;
  if (std::abs(mu_reference) > 1e-12) out.ratio = mu_a / mu_reference;
  return out;
}

}  // namespace transport
