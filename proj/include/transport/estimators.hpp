#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "transport/dataset.hpp"
#include "transport/design.hpp"
#include "transport/glm.hpp"

namespace transport {

// The seven reported estimators, in fixed order: the unadjusted trial mean,
// the outcome-model estimator, two inverse-odds-weighting estimators
// (unnormalized and normalized), and three doubly robust combinations.
enum class Estimator { trial, om, iow1, iow2, dr1, dr2, dr3 };

inline constexpr std::array<Estimator, 7> kEstimators = {
    Estimator::trial, Estimator::om,  Estimator::iow1, Estimator::iow2,
    Estimator::dr1,   Estimator::dr2, Estimator::dr3};
inline constexpr std::size_t kEstimatorCount = 7;

const char* estimator_name(Estimator e);
std::optional<Estimator> estimator_from_name(const std::string& name);

inline std::size_t index_of(Estimator e) { return static_cast<std::size_t>(e); }

using EstimatorValues = std::array<double, kEstimatorCount>;

// Inverse-odds weights for one treatment arm: w = (1-p)/(p*e) on participants
// assigned to the arm, 0 elsewhere.  Carries the probabilities it was built
// from so diagnostics can be reconstructed.
struct WeightSet {
  std::string arm;
  Eigen::VectorXd w;
  Eigen::VectorXd p_hat;  // participation probability, all units
  Eigen::VectorXd e_hat;  // arm-assignment probability, all units
  std::optional<double> known_e;            // set when e was supplied, not fit
  std::optional<double> truncation_cutoff;  // set when weights were capped
  double sum = 0.0;
};

struct ParticipationFit {
  FittedGlm model;
  Eigen::VectorXd p_hat;  // fitted probability for every unit
  // True when any non-participant has p_hat below the positivity threshold.
  bool positivity_warning = false;
};

struct TreatmentFit {
  Eigen::VectorXd e_hat;
  std::optional<FittedGlm> model;  // absent when the probability was known
};

// Logistic fit of participation on the expanded model terms over all units.
ParticipationFit estimate_participation(const StudyDataset& data,
                                        const ModelSpec& spec, KnotBank& bank,
                                        const GlmOptions& options = GlmOptions(),
                                        double positivity_threshold = 1e-3);

// Arm-assignment probability: either the known randomization probability or a
// logistic fit of I(arm) among participants, predicted for every unit.
TreatmentFit estimate_treatment_prob(const StudyDataset& data,
                                     const std::string& arm,
                                     const ModelSpec& spec, KnotBank& bank,
                                     std::optional<double> known = std::nullopt,
                                     const GlmOptions& options = GlmOptions());

// Weight construction from explicit probability vectors.  p_hat must be in
// (0,1] and e_hat in (0,1) wherever a weight is formed.
WeightSet compute_weights(const StudyDataset& data,
                          const Eigen::VectorXd& p_hat,
                          const Eigen::VectorXd& e_hat, const std::string& arm);

// Caps positive weights at their empirical `quantile` (in (0,1]); returns a
// new set with the cutoff recorded.
WeightSet truncate_weights(const WeightSet& weights, double quantile);

// Unweighted mean outcome among participants in one arm.
double trial_only(const StudyDataset& data, const std::string& arm);

// Mean of outcome-model predictions over non-participants.
double mu_om(const StudyDataset& data, const Eigen::VectorXd& g_hat);

// Weighted outcome sum divided by the non-participant count.
double mu_iow1(const StudyDataset& data, const WeightSet& weights);

// Weighted outcome sum divided by the weight sum (normalized form; always
// inside the range of the arm's observed outcomes).
double mu_iow2(const StudyDataset& data, const WeightSet& weights);

// Augmented estimators combining weights with outcome-model predictions.
double mu_dr1(const StudyDataset& data, const WeightSet& weights,
              const Eigen::VectorXd& g_hat);
double mu_dr2(const StudyDataset& data, const WeightSet& weights,
              const Eigen::VectorXd& g_hat);

// Weighted-regression estimator: refit the outcome model among the arm's
// participants using the weights as fit weights, then average predictions
// over non-participants.  The design must cover all units.
double mu_dr3_design(const StudyDataset& data, const WeightSet& weights,
                     const Eigen::MatrixXd& outcome_design,
                     const GlmOptions& options = GlmOptions(),
                     FittedGlm* fitted = nullptr);
double mu_dr3(const StudyDataset& data, const WeightSet& weights,
              const ModelSpec& spec, KnotBank& bank,
              const GlmOptions& options = GlmOptions());

struct Contrast {
  double difference = 0.0;
  std::optional<double> ratio;  // absent when the reference mean is ~0
};

Contrast contrast(double mu_a, double mu_reference);

// Full-pipeline configuration: model specs for the three nuisance fits, the
// arms to estimate, contrast pairs (each estimated arm minus reference), and
// weight-handling options.
struct AnalysisConfig {
  ModelSpec participation;
  ModelSpec treatment;  // ignored for arms with a known probability
  ModelSpec outcome;
  std::map<std::string, double> known_treatment_prob;  // by arm label
  std::vector<std::string> arms;  // empty: all dataset labels
  std::vector<std::pair<std::string, std::string>> contrasts;
  // empty contrasts with exactly two arms: (arms[0], arms[1])
  std::optional<double> truncate_weights_at;
  double positivity_threshold = 1e-3;
  GlmOptions glm;
};

}  // namespace transport
