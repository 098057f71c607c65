#include "transport/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "transport/errors.hpp"
#include "transport/version.hpp"

namespace transport {

namespace {

Json interval_to_json(const Interval& ci) {
  return Json::array({ci.lower, ci.upper});
}

Json model_to_json(const ModelDiagnostics& m) {
  Json out;
  out["model"] = m.model;
  out["converged"] = m.converged;
  out["iterations"] = m.iterations;
  out["max_score_residual"] = m.max_score_residual;
  out["separation_suspected"] = m.separation_suspected;
  return out;
}

}  // namespace

Json quantile_summary_to_json(const QuantileSummary& q) {
  Json out;
  out["min"] = q.min;
  out["p01"] = q.p01;
  out["p05"] = q.p05;
  out["p25"] = q.p25;
  out["p50"] = q.p50;
  out["p75"] = q.p75;
  out["p95"] = q.p95;
  out["p99"] = q.p99;
  out["max"] = q.max;
  return out;
}

Json diagnostics_to_json(const Diagnostics& d) {
  Json out;
  out["weight_mean_ratio"] = d.weight_mean_ratio;
  out["participation_probability"] = {
      {"trial", quantile_summary_to_json(d.p_hat_trial)},
      {"non_participants", quantile_summary_to_json(d.p_hat_target)}};
  out["low_p_hat_count"] = static_cast<std::int64_t>(d.low_p_hat_count);
  out["positivity_threshold"] = d.positivity_threshold;
  out["positivity_warning"] = d.positivity_warning;
  Json arms = Json::array();
  for (const ArmDiagnostics& arm : d.arms) {
    Json a;
    a["arm"] = arm.arm;
    a["weight_summary"] = quantile_summary_to_json(arm.weight_summary);
    a["weight_sum"] = arm.weight_sum;
    a["positive_weights"] = static_cast<std::int64_t>(arm.positive_weights);
    if (arm.truncation_cutoff)
      a["truncation_cutoff"] = *arm.truncation_cutoff;
    else
      a["truncation_cutoff"] = nullptr;
    Json balance = Json::array();
    for (const BalanceRow& row : arm.balance) {
      Json b;
      b["covariate"] = row.covariate;
      b["target_mean"] = row.target_mean;
      b["arm_mean_unweighted"] = row.arm_mean_unweighted;
      b["arm_mean_weighted"] = row.arm_mean_weighted;
      b["pooled_sd"] = row.pooled_sd;
      b["smd_unweighted"] = row.smd_unweighted;
      b["smd_weighted"] = row.smd_weighted;
      balance.push_back(std::move(b));
    }
    a["balance"] = std::move(balance);
    arms.push_back(std::move(a));
  }
  out["arms"] = std::move(arms);
  Json models = Json::array();
  for (const ModelDiagnostics& m : d.models) models.push_back(model_to_json(m));
  out["models"] = std::move(models);
  return out;
}

Json bootstrap_to_json(const BootstrapSummary& b) {
  Json out;
  out["scheme"] = resample_scheme_name(b.scheme);
  out["replicates"] = b.replicates;
  out["failures"] = b.failures;
  out["seed"] = b.seed;
  out["levels"] = Json::array({b.levels.first, b.levels.second});
  return out;
}

Json report_to_json(const EstimateReport& report, const Json& config_echo) {
  const PointEstimates& est = report.estimates;
  const BootstrapSummary* boot =
      report.bootstrap ? &*report.bootstrap : nullptr;

  Json out;
  out["schema_version"] = 1;
  out["tool"] = {{"name", kToolName}, {"version", kVersion}};
  out["config"] = config_echo;

  Json arms = Json::array();
  for (std::size_t a = 0; a < est.arms.size(); ++a) {
    Json arm;
    arm["arm"] = est.arms[a];
    Json by_estimator;
    for (std::size_t e = 0; e < kEstimatorCount; ++e) {
      Json cell;
      cell["estimate"] = est.mu[a][e];
      if (boot)
        cell["ci"] = interval_to_json(boot->mu_ci[a][e]);
      else
        cell["ci"] = nullptr;
      by_estimator[estimator_name(kEstimators[e])] = std::move(cell);
    }
    arm["estimates"] = std::move(by_estimator);
    arms.push_back(std::move(arm));
  }
  out["arms"] = std::move(arms);

  Json contrasts = Json::array();
  for (std::size_t c = 0; c < est.contrast_arms.size(); ++c) {
    Json contrast;
    contrast["arm"] = est.contrast_arms[c].first;
    contrast["reference"] = est.contrast_arms[c].second;
    Json by_estimator;
    for (std::size_t e = 0; e < kEstimatorCount; ++e) {
      Json cell;
      cell["difference"] = est.difference[c][e];
      if (boot)
        cell["difference_ci"] = interval_to_json(boot->difference_ci[c][e]);
      else
        cell["difference_ci"] = nullptr;
      if (est.ratio[c][e])
        cell["ratio"] = *est.ratio[c][e];
      else
        cell["ratio"] = nullptr;
      if (boot && boot->ratio_ci[c][e])
        cell["ratio_ci"] = interval_to_json(*boot->ratio_ci[c][e]);
      else
        cell["ratio_ci"] = nullptr;
      by_estimator[estimator_name(kEstimators[e])] = std::move(cell);
    }
    contrast["estimates"] = std::move(by_estimator);
    contrasts.push_back(std::move(contrast));
  }
  out["contrasts"] = std::move(contrasts);

  out["diagnostics"] = diagnostics_to_json(report.diagnostics);
  out["bootstrap"] = boot ? bootstrap_to_json(*boot) : Json(nullptr);
  return out;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  std::error_code ec;
  fs::create_directories(dir, ec);  // best effort; the open below reports errors

  std::random_device rd;
  const fs::path tmp =
      dir / (target.filename().string() + ".tmp." + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("failed writing '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code cleanup;
    fs::remove(tmp, cleanup);
    throw IoError("cannot rename '" + tmp.string() + "' to '" + path +
                  "': " + ec.message());
  }
}

void write_report(const EstimateReport& report, const Json& config_echo,
                  const std::string& path) {
  write_text_atomic(path, report_to_json(report, config_echo).dump(2) + "\n");
}

}  // namespace transport
