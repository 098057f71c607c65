#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "transport/estimators.hpp"

namespace transport {

// How bootstrap replicates are drawn.  `cohort` resamples all units jointly
// (participation counts vary); `within_s` resamples participants and
// non-participants separately, holding both group sizes fixed.
enum class ResampleScheme { cohort, within_s };

const char* resample_scheme_name(ResampleScheme s);
std::optional<ResampleScheme> resample_scheme_from_name(const std::string& name);

struct BootstrapConfig {
  int replicates = 1000;
  std::uint64_t seed = 0;
  // Default depends on the dataset: cohort resampling for nested designs,
  // within-group resampling for non-nested ones.
  std::optional<ResampleScheme> scheme;
  std::pair<double, double> levels{0.025, 0.975};
  double max_failure_fraction = 0.01;
  int threads = 0;  // 0: all cores, capped by TRANSPORT_THREADS
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Percentile intervals aligned with the point estimates they accompany:
// mu_ci by arm, difference/ratio by contrast pair, each indexed by estimator.
struct BootstrapSummary {
  ResampleScheme scheme = ResampleScheme::cohort;
  int replicates = 0;
  int failures = 0;
  std::uint64_t seed = 0;
  std::pair<double, double> levels{0.025, 0.975};
  std::vector<std::array<Interval, kEstimatorCount>> mu_ci;
  std::vector<std::array<Interval, kEstimatorCount>> difference_ci;
  std::vector<std::array<std::optional<Interval>, kEstimatorCount>> ratio_ci;
};

// Nonparametric bootstrap over the full estimation pipeline.  Every replicate
// refits all nuisance models; spline knots stay frozen at their full-data
// locations.  Failed replicates are counted, and the run errors only when
// failures exceed max_failure_fraction.
BootstrapSummary run_bootstrap(const StudyDataset& data,
                               const AnalysisConfig& config,
                               const BootstrapConfig& boot);

}  // namespace transport
