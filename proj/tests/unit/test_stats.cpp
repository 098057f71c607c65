#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "transport/errors.hpp"
#include "transport/rng.hpp"
#include "transport/stats.hpp"

using namespace transport;

TEST_CASE("expit and logit are stable and mutually inverse") {
  CHECK(expit(0.0) == doctest::Approx(0.5));
  CHECK(expit(800.0) == 1.0);
  CHECK(expit(-800.0) == 0.0);
  CHECK(std::isfinite(expit(-745.0)));
  for (double v : {-30.0, -3.0, -0.2, 0.0, 0.7, 4.0})
    CHECK(logit(expit(v)) == doctest::Approx(v).epsilon(1e-12));
  // near saturation 1 - p loses relative precision of about eps * e^v
  CHECK(logit(expit(25.0)) == doctest::Approx(25.0).epsilon(1e-5));
  for (double p : {1e-12, 0.01, 0.3, 0.5, 0.9, 1 - 1e-12})
    CHECK(expit(logit(p)) == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("quantiles interpolate like R's default type") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);  // 1..100
  CHECK(quantile_sorted(v, 0.10) == doctest::Approx(10.9).epsilon(1e-12));
  CHECK(quantile_sorted(v, 0.50) == doctest::Approx(50.5).epsilon(1e-12));
  CHECK(quantile_sorted(v, 0.90) == doctest::Approx(90.1).epsilon(1e-12));
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 1.0) == 100.0);

  std::vector<double> w = {2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(quantile_sorted(w, 0.25) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(quantile_sorted(w, 0.50) == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(quantile_sorted(w, 0.90) == doctest::Approx(7.6).epsilon(1e-12));

  std::vector<double> one = {3.5};
  CHECK(quantile_sorted(one, 0.0) == 3.5);
  CHECK(quantile_sorted(one, 0.73) == 3.5);
  CHECK(quantile_sorted(one, 1.0) == 3.5);
}

TEST_CASE("quantile is monotone in the probability") {
  auto gen = make_stream(99, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> v(57);
  for (double& x : v) x = unif(gen);
  std::sort(v.begin(), v.end());
  double last = -1.0;
  for (int i = 0; i <= 50; ++i) {
    const double q = quantile_sorted(v, i / 50.0);
    CHECK(q >= last);
    last = q;
  }
}

TEST_CASE("summary covers the nine standard quantiles") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  const QuantileSummary s = summarize(v);
  CHECK(s.min == 1.0);
  CHECK(s.p01 == doctest::Approx(1.99).epsilon(1e-12));
  CHECK(s.p05 == doctest::Approx(5.95).epsilon(1e-12));
  CHECK(s.p25 == doctest::Approx(25.75).epsilon(1e-12));
  CHECK(s.p50 == doctest::Approx(50.5).epsilon(1e-12));
  CHECK(s.p75 == doctest::Approx(75.25).epsilon(1e-12));
  CHECK(s.p95 == doctest::Approx(95.05).epsilon(1e-12));
  CHECK(s.p99 == doctest::Approx(99.01).epsilon(1e-12));
  CHECK(s.max == 100.0);

  const QuantileSummary single = summarize({7.0});
  CHECK(single.min == 7.0);
  CHECK(single.p50 == 7.0);
  CHECK(single.max == 7.0);

  CHECK_THROWS_AS(summarize({}), InvalidArgument);
}

TEST_CASE("mean and sample variance") {
  CHECK(mean({1, 2, 3, 4}) == doctest::Approx(2.5));
  CHECK(sample_variance({1, 2, 3, 4}) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(sample_variance({5, 5, 5}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(sample_variance({1.0}), InvalidArgument);
}

TEST_CASE("substreams differ and are reproducible") {
  CHECK(substream_seed(1, 2) == substream_seed(1, 2));
  CHECK(substream_seed(1, 2) != substream_seed(1, 3));
  CHECK(substream_seed(1, 2) != substream_seed(2, 2));
  CHECK(substream_seed(1, 2, 0) != substream_seed(1, 2, 1));
  auto a = make_stream(7, 0);
  auto b = make_stream(7, 0);
  for (int i = 0; i < 5; ++i) CHECK(a() == b());
}
