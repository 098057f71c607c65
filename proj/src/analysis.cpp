#include "transport/analysis.hpp"

#include <cmath>
#include <set>

#include "transport/errors.hpp"

namespace transport {

namespace {

ModelDiagnostics describe_fit(const std::string& name, const FittedGlm& fit) {
  ModelDiagnostics d;
  d.model = name;
  d.converged = fit.converged;
  d.iterations = fit.iterations;
  d.max_score_residual = fit.max_score_residual;
  d.separation_suspected = fit.separation_suspected;
  return d;
}

// s/arm/y plus the gathered design rows for one bootstrap replicate.  The
// covariate matrix itself is not needed: all downstream math runs on the
// pre-expanded designs.
struct GatheredData {
  StudyDataset data;
  Eigen::MatrixXd participation, treatment, outcome;
};

GatheredData gather_rows(const PreparedAnalysis& prepared,
                         const std::vector<Eigen::Index>& rows) {
  const StudyDataset& full = *prepared.data;
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  GatheredData out;
  out.data.s.resize(m);
  out.data.arm.resize(m);
  out.data.y.resize(m);
  out.data.x.resize(m, 0);
  out.data.treatment_labels = full.treatment_labels;
  out.data.design_kind = full.design_kind;
  out.data.outcome_kind = full.outcome_kind;
  out.participation.resize(m, prepared.participation_design.x.cols());
  out.treatment.resize(m, prepared.treatment_design.x.cols());
  out.outcome.resize(m, prepared.outcome_design.x.cols());
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index i = rows[static_cast<std::size_t>(r)];
    if (i < 0 || i >= full.n())
      throw InvalidArgument("replicate row index out of range");
    out.data.s[r] = full.s[i];
    out.data.arm[r] = full.arm[i];
    out.data.y[r] = full.y[i];
    out.participation.row(r) = prepared.participation_design.x.row(i);
    out.treatment.row(r) = prepared.treatment_design.x.row(i);
    out.outcome.row(r) = prepared.outcome_design.x.row(i);
  }
  return out;
}

// The estimation pipeline over one dataset and its design matrices.
PointEstimates run_pipeline(const StudyDataset& d,
                            const Eigen::MatrixXd& participation_x,
                            const Eigen::MatrixXd& treatment_x,
                            const Eigen::MatrixXd& outcome_x,
                            const PreparedAnalysis& prepared,
                            AnalysisArtifacts* artifacts) {
  const AnalysisConfig& config = prepared.config;
  if (d.n_target() == 0)
    throw NoTargetUnits("no non-participants to transport to");
  if (d.n_trial() == 0) throw OneClassOnly("no trial participants");

  // Participation model over all units.
  const Eigen::VectorXd s_response = d.s.cast<double>();
  const FittedGlm p_fit =
      fit_logistic(participation_x, s_response, Eigen::VectorXd(), config.glm);
  const Eigen::VectorXd p_hat = p_fit.predict(participation_x);

  if (artifacts) {
    artifacts->p_hat = p_hat;
    artifacts->participation_fit = describe_fit("participation", p_fit);
    artifacts->positivity_warning = false;
    for (Eigen::Index i = 0; i < d.n(); ++i)
      if (d.s[i] == 0 && p_hat[i] < config.positivity_threshold) {
        artifacts->positivity_warning = true;
        break;
      }
    artifacts->arms.clear();
  }

  std::vector<Eigen::Index> trial_rows;
  trial_rows.reserve(static_cast<std::size_t>(d.n_trial()));
  for (Eigen::Index i = 0; i < d.n(); ++i)
    if (d.s[i] == 1) trial_rows.push_back(i);

  PointEstimates out;
  out.arms = config.arms;
  out.mu.resize(config.arms.size());

  for (std::size_t a = 0; a < config.arms.size(); ++a) {
    const std::string& arm = config.arms[a];
    const int code = d.arm_code(arm);
    if (code < 0) throw InvalidArgument("unknown treatment arm '" + arm + "'");

    std::vector<Eigen::Index> arm_rows;
    for (Eigen::Index i : trial_rows)
      if (d.arm[i] == code) arm_rows.push_back(i);
    if (arm_rows.empty())
      throw OneClassOnly("arm '" + arm + "' has no participants");

    // Arm-assignment probability.
    Eigen::VectorXd e_hat;
    std::optional<FittedGlm> e_fit;
    std::optional<double> known;
    if (auto it = config.known_treatment_prob.find(arm);
        it != config.known_treatment_prob.end())
      known = it->second;
    if (known) {
      if (!(*known > 0.0 && *known < 1.0))
        throw InvalidArgument("known treatment probability must be in (0,1)");
      e_hat = Eigen::VectorXd::Constant(d.n(), *known);
    } else {
      Eigen::MatrixXd sub(trial_rows.size(), treatment_x.cols());
      Eigen::VectorXd indicator(trial_rows.size());
      for (std::size_t r = 0; r < trial_rows.size(); ++r) {
        sub.row(static_cast<Eigen::Index>(r)) = treatment_x.row(trial_rows[r]);
        indicator[static_cast<Eigen::Index>(r)] =
            d.arm[trial_rows[r]] == code ? 1.0 : 0.0;
      }
      e_fit = fit_logistic(sub, indicator, Eigen::VectorXd(), config.glm);
      e_hat = e_fit->predict(treatment_x);
    }

    WeightSet weights = compute_weights(d, p_hat, e_hat, arm);
    if (known) weights.known_e = known;
    if (config.truncate_weights_at)
      weights = truncate_weights(weights, *config.truncate_weights_at);

    // Outcome model among the arm's participants, predictions for all units.
    Eigen::MatrixXd arm_design(arm_rows.size(), outcome_x.cols());
    Eigen::VectorXd arm_y(arm_rows.size()), arm_w(arm_rows.size());
    for (std::size_t r = 0; r < arm_rows.size(); ++r) {
      arm_design.row(static_cast<Eigen::Index>(r)) = outcome_x.row(arm_rows[r]);
      arm_y[static_cast<Eigen::Index>(r)] = d.y[arm_rows[r]];
      arm_w[static_cast<Eigen::Index>(r)] = weights.w[arm_rows[r]];
    }
    const bool binary = d.outcome_kind == OutcomeKind::binary;
    const FittedGlm g_fit =
        binary ? fit_logistic(arm_design, arm_y, Eigen::VectorXd(), config.glm)
               : fit_linear(arm_design, arm_y, Eigen::VectorXd());
    const Eigen::VectorXd g_hat = g_fit.predict(outcome_x);

    FittedGlm g_weighted;
    EstimatorValues values;
    values[index_of(Estimator::trial)] = trial_only(d, arm);
    values[index_of(Estimator::om)] = mu_om(d, g_hat);
    values[index_of(Estimator::iow1)] = mu_iow1(d, weights);
    values[index_of(Estimator::iow2)] = mu_iow2(d, weights);
    values[index_of(Estimator::dr1)] = mu_dr1(d, weights, g_hat);
    values[index_of(Estimator::dr2)] = mu_dr2(d, weights, g_hat);
    values[index_of(Estimator::dr3)] =
        mu_dr3_design(d, weights, outcome_x, config.glm, &g_weighted);
    for (double v : values)
      if (!std::isfinite(v))
        throw Error("non-finite estimate for arm '" + arm + "'");
    out.mu[a] = values;

    if (artifacts) {
      ArmArtifacts arm_art;
      arm_art.arm = arm;
      arm_art.weights = weights;
      arm_art.g_hat = g_hat;
      if (e_fit)
        arm_art.treatment_fit = describe_fit("treatment:" + arm, *e_fit);
      arm_art.outcome_fit = describe_fit("outcome:" + arm, g_fit);
      arm_art.weighted_outcome_fit =
          describe_fit("outcome_weighted:" + arm, g_weighted);
      artifacts->arms.push_back(std::move(arm_art));
    }
  }

  for (const auto& [arm, reference] : config.contrasts) {
    std::size_t ia = config.arms.size(), ib = config.arms.size();
    for (std::size_t a = 0; a < config.arms.size(); ++a) {
      if (config.arms[a] == arm) ia = a;
      if (config.arms[a] == reference) ib = a;
    }
    out.contrast_arms.emplace_back(arm, reference);
    EstimatorValues diff;
    std::array<std::optional<double>, kEstimatorCount> ratio;
    for (std::size_t e = 0; e < kEstimatorCount; ++e) {
      const Contrast c = contrast(out.mu[ia][e], out.mu[ib][e]);
      diff[e] = c.difference;
      ratio[e] = c.ratio;
    }
    out.difference.push_back(diff);
    out.ratio.push_back(ratio);
  }
  return out;
}

Diagnostics assemble_diagnostics(const PreparedAnalysis& prepared,
                                 const AnalysisArtifacts& artifacts) {
  const StudyDataset& d = *prepared.data;
  Diagnostics diag;
  diag.weight_mean_ratio = weight_mean_ratio(d, artifacts.p_hat);
  const OverlapSummary overlap =
      overlap_summary(artifacts.p_hat, d.s, prepared.config.positivity_threshold);
  diag.p_hat_trial = overlap.trial;
  diag.p_hat_target = overlap.target;
  diag.low_p_hat_count = overlap.low_p_hat_count;
  diag.positivity_threshold = overlap.threshold;
  diag.positivity_warning = artifacts.positivity_warning;

  diag.models.push_back(artifacts.participation_fit);
  for (const ArmArtifacts& arm : artifacts.arms) {
    ArmDiagnostics ad;
    ad.arm = arm.arm;
    std::vector<double> positive;
    for (Eigen::Index i = 0; i < arm.weights.w.size(); ++i)
      if (arm.weights.w[i] > 0.0) positive.push_back(arm.weights.w[i]);
    if (!positive.empty()) ad.weight_summary = summarize(positive);
    ad.weight_sum = arm.weights.sum;
    ad.positive_weights = static_cast<Eigen::Index>(positive.size());
    ad.truncation_cutoff = arm.weights.truncation_cutoff;
    ad.balance = balance_table(d, arm.weights);
    diag.arms.push_back(std::move(ad));

    if (arm.treatment_fit) diag.models.push_back(*arm.treatment_fit);
    diag.models.push_back(arm.outcome_fit);
    diag.models.push_back(arm.weighted_outcome_fit);
  }
  return diag;
}

}  // namespace

PreparedAnalysis prepare_analysis(const StudyDataset& data,
                                  const AnalysisConfig& config) {
  data.validate();
  PreparedAnalysis prepared;
  prepared.data = &data;
  prepared.config = config;

  if (prepared.config.arms.empty())
    prepared.config.arms = data.treatment_labels;
  {
    std::set<std::string> seen;
    for (const std::string& arm : prepared.config.arms) {
      if (!seen.insert(arm).second)
        throw ConfigError("arm '" + arm + "' listed twice");
      if (data.arm_code(arm) < 0)
        throw ConfigError("arm '" + arm + "' not present in the dataset");
      prepared.arm_codes.push_back(data.arm_code(arm));
    }
    for (const auto& [arm, prob] : prepared.config.known_treatment_prob) {
      if (!seen.count(arm))
        throw ConfigError("known treatment probability for unknown arm '" +
                          arm + "'");
      if (!(prob > 0.0 && prob < 1.0))
        throw ConfigError("known treatment probability for arm '" + arm +
                          "' must be in (0,1)");
    }
    if (prepared.config.contrasts.empty() && prepared.config.arms.size() == 2)
      prepared.config.contrasts = {
          {prepared.config.arms[0], prepared.config.arms[1]}};
    for (const auto& [arm, reference] : prepared.config.contrasts) {
      if (!seen.count(arm) || !seen.count(reference))
        throw ConfigError("contrast (" + arm + ", " + reference +
                          ") names an arm that is not being estimated");
      if (arm == reference)
        throw ConfigError("contrast compares arm '" + arm + "' with itself");
    }
  }
  if (prepared.config.truncate_weights_at &&
      !(*prepared.config.truncate_weights_at > 0.0 &&
        *prepared.config.truncate_weights_at <= 1.0))
    throw ConfigError("weight truncation quantile must be in (0, 1]");

  prepared.participation_design =
      build_design(data, prepared.config.participation, prepared.knots);
  prepared.treatment_design =
      build_design(data, prepared.config.treatment, prepared.knots);
  prepared.outcome_design =
      build_design(data, prepared.config.outcome, prepared.knots);
  return prepared;
}

PointEstimates point_estimates(const PreparedAnalysis& prepared,
                               const std::vector<Eigen::Index>& rows,
                               AnalysisArtifacts* artifacts) {
  if (rows.empty())
    return run_pipeline(*prepared.data, prepared.participation_design.x,
                        prepared.treatment_design.x, prepared.outcome_design.x,
                        prepared, artifacts);
  const GatheredData g = gather_rows(prepared, rows);
  return run_pipeline(g.data, g.participation, g.treatment, g.outcome, prepared,
                      artifacts);
}

EstimateReport analyze(const StudyDataset& data, const AnalysisConfig& config,
                       const std::optional<BootstrapConfig>& boot) {
  const PreparedAnalysis prepared = prepare_analysis(data, config);
  EstimateReport report;
  report.estimates = point_estimates(prepared, {}, &report.artifacts);
  report.diagnostics = assemble_diagnostics(prepared, report.artifacts);
  if (boot) report.bootstrap = bootstrap_core(prepared, *boot);
  return report;
}

}  // namespace transport
