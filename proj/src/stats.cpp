#include "transport/stats.hpp"

#include <algorithm>
#include <cstddef>

#include "transport/errors.hpp"

namespace transport {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("quantile of empty sample");
  if (p < 0.0 || p > 1.0) throw InvalidArgument("quantile probability outside [0, 1]");
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> quantiles(std::vector<double> values,
                              const std::vector<double>& probs) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  out.reserve(probs.size());
  for (double p : probs) out.push_back(quantile_sorted(values, p));
  return out;
}

QuantileSummary summarize(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("summary of empty sample");
  std::sort(values.begin(), values.end());
  QuantileSummary s;
  s.min = values.front();
  s.p01 = quantile_sorted(values, 0.01);
  s.p05 = quantile_sorted(values, 0.05);
  s.p25 = quantile_sorted(values, 0.25);
  s.p50 = quantile_sorted(values, 0.50);
  s.p75 = quantile_sorted(values, 0.75);
  s.p95 = quantile_sorted(values, 0.95);
  s.p99 = quantile_sorted(values, 0.99);
  s.max = values.back();
  return s;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) throw InvalidArgument("mean of empty sample");
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

double sample_variance(const std::vector<double>& values) {
  if (values.size() < 2) throw InvalidArgument("variance needs at least two values");
  const double m = mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - m) * (v - m);
  return acc / static_cast<double>(values.size() - 1);
}

}  // namespace transport
