#pragma once

#include <cmath>
#include <vector>

namespace transport {

// Numerically stable inverse-logit: never overflows, returns values in (0, 1)
// up to floating-point rounding.
inline double expit(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

// Empirical quantile with linear interpolation between order statistics
// (the default convention in most statistical software).  `sorted` must be
// nondecreasing and nonempty; p in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double p);

// Convenience: copies, sorts, then evaluates each probability.
std::vector<double> quantiles(std::vector<double> values,
                              const std::vector<double>& probs);

// Fixed nine-point summary used by the diagnostics report.
struct QuantileSummary {
  double min = 0, p01 = 0, p05 = 0, p25 = 0, p50 = 0, p75 = 0, p95 = 0,
         p99 = 0, max = 0;
};

QuantileSummary summarize(std::vector<double> values);

double mean(const std::vector<double>& values);
// Unbiased (n-1 denominator) sample variance; requires n >= 2.
double sample_variance(const std::vector<double>& values);

}  // namespace transport
