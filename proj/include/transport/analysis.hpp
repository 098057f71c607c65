#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "transport/diagnostics.hpp"
#include "transport/estimators.hpp"
#include "transport/inference.hpp"

namespace transport {

// Point estimates for every requested arm and contrast, indexed by estimator.
struct PointEstimates {
  std::vector<std::string> arms;
  std::vector<EstimatorValues> mu;  // [arm][estimator]
  std::vector<std::pair<std::string, std::string>> contrast_arms;
  std::vector<EstimatorValues> difference;  // [contrast][estimator]
  std::vector<std::array<std::optional<double>, kEstimatorCount>> ratio;
};

// Everything shared between the full-data run and bootstrap replicates:
// resolved arms/contrasts, frozen spline knots, and the three design
// matrices built over the full dataset.
struct PreparedAnalysis {
  const StudyDataset* data = nullptr;
  AnalysisConfig config;  // arms and contrasts resolved
  std::vector<int> arm_codes;
  KnotBank knots;
  DesignMatrix participation_design;
  DesignMatrix treatment_design;
  DesignMatrix outcome_design;
};

PreparedAnalysis prepare_analysis(const StudyDataset& data,
                                  const AnalysisConfig& config);

// Fitted quantities from one pipeline run, kept for diagnostics and export.
struct ArmArtifacts {
  std::string arm;
  WeightSet weights;
  Eigen::VectorXd g_hat;  // unweighted outcome-model predictions, all units
  std::optional<ModelDiagnostics> treatment_fit;  // absent when e known
  ModelDiagnostics outcome_fit;
  ModelDiagnostics weighted_outcome_fit;
};

struct AnalysisArtifacts {
  Eigen::VectorXd p_hat;
  ModelDiagnostics participation_fit;
  bool positivity_warning = false;
  std::vector<ArmArtifacts> arms;
};

// Runs the estimation pipeline.  `rows` empty means the full dataset;
// otherwise rows index the original data, with repetition allowed (bootstrap
// replicates reuse the prepared designs by row gathering).
PointEstimates point_estimates(const PreparedAnalysis& prepared,
                               const std::vector<Eigen::Index>& rows = {},
                               AnalysisArtifacts* artifacts = nullptr);

// Full deliverable for one dataset: estimates, diagnostics, optional
// bootstrap intervals, and the artifacts the diagnostics were computed from.
struct EstimateReport {
  PointEstimates estimates;
  Diagnostics diagnostics;
  std::optional<BootstrapSummary> bootstrap;
  AnalysisArtifacts artifacts;
};

EstimateReport analyze(
    const StudyDataset& data, const AnalysisConfig& config,
    const std::optional<BootstrapConfig>& boot = std::nullopt);

// Bootstrap on an already-prepared analysis (shared by analyze and
// run_bootstrap).
BootstrapSummary bootstrap_core(const PreparedAnalysis& prepared,
                                const BootstrapConfig& boot);

}  // namespace transport
