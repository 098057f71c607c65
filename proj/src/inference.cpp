#include "transport/inference.hpp"

#include <algorithm>
#include <atomic>
#include <string>

#include "transport/analysis.hpp"
#include "transport/errors.hpp"
#include "transport/parallel.hpp"
#include "transport/rng.hpp"
#include "transport/stats.hpp"

namespace transport {

const char* resample_scheme_name(ResampleScheme s) {
  return s == ResampleScheme::cohort ? "cohort" : "within_s";
}

std::optional<ResampleScheme> resample_scheme_from_name(
    const std::string& name) {
  if (name == "cohort") return ResampleScheme::cohort;
  if (name == "within_s") return ResampleScheme::within_s;
  return std::nullopt;
}

namespace {

void check_config(const BootstrapConfig& boot) {
  if (boot.replicates < 1)
    throw InvalidArgument("bootstrap needs at least one replicate");
  if (!(boot.levels.first > 0.0 && boot.levels.second < 1.0 &&
        boot.levels.first < boot.levels.second))
    throw InvalidArgument("percentile levels must satisfy 0 < lower < upper < 1");
  if (!(boot.max_failure_fraction >= 0.0 && boot.max_failure_fraction <= 1.0))
    throw InvalidArgument("max_failure_fraction must be in [0, 1]");
}

Interval percentile_interval(std::vector<double> values,
                             std::pair<double, double> levels) {
  std::sort(values.begin(), values.end());
  return Interval{quantile_sorted(values, levels.first),
                  quantile_sorted(values, levels.second)};
}

}  // namespace

BootstrapSummary bootstrap_core(const PreparedAnalysis& prepared,
                                const BootstrapConfig& boot) {
  check_config(boot);
  const StudyDataset& d = *prepared.data;
  const Eigen::Index n = d.n();
  const ResampleScheme scheme = boot.scheme.value_or(
      d.design_kind == DesignKind::nested ? ResampleScheme::cohort
                                          : ResampleScheme::within_s);

  std::vector<Eigen::Index> trial_rows, target_rows;
  for (Eigen::Index i = 0; i < n; ++i)
    (d.s[i] == 1 ? trial_rows : target_rows).push_back(i);

  const int R = boot.replicates;
  std::vector<std::optional<PointEstimates>> results(
      static_cast<std::size_t>(R));
  std::atomic<int> failures{0};

  parallel_for(R, boot.threads, [&](int r) {
    auto gen = make_stream(boot.seed, static_cast<std::uint64_t>(r));
    std::vector<Eigen::Index> rows;
    rows.reserve(static_cast<std::size_t>(n));
    if (scheme == ResampleScheme::cohort) {
      std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
      for (Eigen::Index i = 0; i < n; ++i) rows.push_back(pick(gen));
    } else {
      std::uniform_int_distribution<std::size_t> pick_trial(
          0, trial_rows.size() - 1);
      std::uniform_int_distribution<std::size_t> pick_target(
          0, target_rows.size() - 1);
      for (std::size_t i = 0; i < trial_rows.size(); ++i)
        rows.push_back(trial_rows[pick_trial(gen)]);
      for (std::size_t i = 0; i < target_rows.size(); ++i)
        rows.push_back(target_rows[pick_target(gen)]);
    }
    try {
      results[static_cast<std::size_t>(r)] = point_estimates(prepared, rows);
    } catch (const Error&) {
      failures.fetch_add(1);
    }
  });

  BootstrapSummary out;
  out.scheme = scheme;
  out.replicates = R;
  out.failures = failures.load();
  out.seed = boot.seed;
  out.levels = boot.levels;
  if (out.failures > boot.max_failure_fraction * R)
    throw TooManyFailures(std::to_string(out.failures) + " of " +
                          std::to_string(R) +
                          " bootstrap replicates failed (limit " +
                          std::to_string(boot.max_failure_fraction) + ")");

  const std::size_t n_arms = prepared.config.arms.size();
  const std::size_t n_contrasts = prepared.config.contrasts.size();
  out.mu_ci.resize(n_arms);
  out.difference_ci.resize(n_contrasts);
  out.ratio_ci.resize(n_contrasts);

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(R));
  for (std::size_t a = 0; a < n_arms; ++a)
    for (std::size_t e = 0; e < kEstimatorCount; ++e) {
      values.clear();
      for (const auto& res : results)
        if (res) values.push_back(res->mu[a][e]);
      out.mu_ci[a][e] = percentile_interval(values, boot.levels);
    }
  for (std::size_t c = 0; c < n_contrasts; ++c)
    for (std::size_t e = 0; e < kEstimatorCount; ++e) {
      values.clear();
      for (const auto& res : results)
        if (res) values.push_back(res->difference[c][e]);
      out.difference_ci[c][e] = percentile_interval(values, boot.levels);

      values.clear();
      for (const auto& res : results)
        if (res && res->ratio[c][e]) values.push_back(*res->ratio[c][e]);
      if (!values.empty())
        out.ratio_ci[c][e] = percentile_interval(values, boot.levels);
    }
  return out;
}

BootstrapSummary run_bootstrap(const StudyDataset& data,
                               const AnalysisConfig& config,
                               const BootstrapConfig& boot) {
  const PreparedAnalysis prepared = prepare_analysis(data, config);
  return bootstrap_core(prepared, boot);
}

}  // namespace transport
