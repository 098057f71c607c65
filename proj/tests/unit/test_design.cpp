#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <vector>

#include "transport/design.hpp"
#include "transport/errors.hpp"

using namespace transport;

namespace {

StudyDataset tiny_dataset() {
  StudyDataset d;
  const int n = 8;
  d.s.resize(n);
  d.s << 1, 1, 1, 1, 0, 0, 0, 0;
  d.arm.resize(n);
  d.arm << 0, 1, 0, 1, -1, -1, -1, -1;
  d.y.resize(n);
  d.y << 1.0, 2.0, 0.5, 3.0, std::nan(""), std::nan(""), std::nan(""),
      std::nan("");
  d.x.resize(n, 2);
  d.x << 0.2, 5.0, -1.1, 6.0, 0.7, 7.0, 1.9, 8.0, -0.3, 9.0, 0.4, 10.0, 1.2,
      11.0, -0.8, 12.0;
  d.covariate_names = {"age", "sev"};
  d.treatment_labels = {"0", "1"};
  return d;
}

}  // namespace

TEST_CASE("default knot placement uses the conventional quantiles") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);

  const std::vector<double> k3 = choose_knots(v, 3);
  REQUIRE(k3.size() == 3);
  CHECK(k3[0] == doctest::Approx(10.9).epsilon(1e-12));
  CHECK(k3[1] == doctest::Approx(50.5).epsilon(1e-12));
  CHECK(k3[2] == doctest::Approx(90.1).epsilon(1e-12));

  const std::vector<double> k5 = choose_knots(v, 5);
  REQUIRE(k5.size() == 5);
  CHECK(k5[0] == doctest::Approx(5.95).epsilon(1e-12));
  CHECK(k5[1] == doctest::Approx(28.225).epsilon(1e-12));
  CHECK(k5[2] == doctest::Approx(50.5).epsilon(1e-12));
  CHECK(k5[3] == doctest::Approx(72.775).epsilon(1e-12));
  CHECK(k5[4] == doctest::Approx(95.05).epsilon(1e-12));

  CHECK_THROWS_AS(choose_knots({1.0, 2.0}, 3), TooFewDistinctValues);
  CHECK_THROWS_AS(choose_knots(std::vector<double>(50, 1.0), 3),
                  TooFewDistinctValues);
  CHECK_THROWS_AS(choose_knots(v, 2), InvalidArgument);
  CHECK_THROWS_AS(choose_knots(v, 8), InvalidArgument);
}

TEST_CASE("restricted cubic spline basis values and tail linearity") {
  const std::vector<double> knots = {0.0, 1.0, 2.0};
  Eigen::VectorXd x(1);
  x << 3.0;
  const Eigen::MatrixXd basis = rcs_basis(x, knots);
  REQUIRE(basis.rows() == 1);
  REQUIRE(basis.cols() == 2);
  CHECK(basis(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
  // ((3)^3 - 2*(2)^3 + 1*(1)^3) / (2-0)^2 = (27 - 16 + 1)/4
  CHECK(basis(0, 1) == doctest::Approx(3.0).epsilon(1e-12));

  // Below the first knot every nonlinear column vanishes.
  Eigen::VectorXd lo(1);
  lo << -2.5;
  CHECK(rcs_basis(lo, knots)(0, 1) == doctest::Approx(0.0));

  // Beyond the last knot the function is linear: second differences vanish.
  const std::vector<double> knots5 = {-1.0, 0.0, 0.5, 1.5, 2.0};
  Eigen::VectorXd far(3);
  far << 10.0, 11.0, 12.0;
  const Eigen::MatrixXd tail = rcs_basis(far, knots5);
  for (Eigen::Index j = 0; j < tail.cols(); ++j) {
    const double second_diff = tail(2, j) - 2 * tail(1, j) + tail(0, j);
    CHECK(second_diff == doctest::Approx(0.0).scale(1).epsilon(1e-9));
  }

  CHECK_THROWS_AS(rcs_basis(x, {1.0, 1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(rcs_basis(x, {0.0, 1.0}), InvalidArgument);
}

TEST_CASE("design expansion is ordered and named deterministically") {
  const StudyDataset d = tiny_dataset();
  ModelSpec spec;
  spec.terms = {MainEffect{"age"}, SplineTerm{"sev", 3},
                Interaction{"age", "sev"}};
  KnotBank bank;
  const DesignMatrix design = build_design(d, spec, bank);

  REQUIRE(design.column_names.size() == 5);
  CHECK(design.column_names[0] == "(intercept)");
  CHECK(design.column_names[1] == "age");
  CHECK(design.column_names[2] == "sev");
  CHECK(design.column_names[3] == "sev'");
  CHECK(design.column_names[4] == "age*sev");
  CHECK(design.x.rows() == d.n());
  CHECK(design.x.cols() == design_width(spec));

  CHECK(design.x.col(0).isConstant(1.0));
  CHECK(design.x(2, 1) == doctest::Approx(0.7));
  CHECK(design.x(2, 4) == doctest::Approx(0.7 * 7.0));

  // Knots were recorded and reused from the bank.
  REQUIRE(bank.find("sev", 3) != nullptr);
  KnotBank prefilled;
  prefilled.entries[KnotBank::key("sev", 3)] = {5.0, 6.0, 12.0};
  const DesignMatrix again = build_design(d, spec, prefilled);
  CHECK(prefilled.entries[KnotBank::key("sev", 3)] ==
        std::vector<double>{5.0, 6.0, 12.0});
  CHECK(again.x(7, 3) != doctest::Approx(design.x(7, 3)));

  ModelSpec bad;
  bad.terms = {MainEffect{"height"}};
  KnotBank bank2;
  CHECK_THROWS_AS(build_design(d, bad, bank2), UnknownColumn);

  ModelSpec no_intercept;
  no_intercept.terms = {MainEffect{"age"}};
  no_intercept.intercept = false;
  KnotBank bank3;
  const DesignMatrix lean = build_design(d, no_intercept, bank3);
  CHECK(lean.x.cols() == 1);
  CHECK(lean.column_names[0] == "age");
}

TEST_CASE("spline design columns are continuous across knots") {
  std::vector<double> values(200);
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = -3.0 + 6.0 * static_cast<double>(i) / 199.0;
  const std::vector<double> knots = choose_knots(values, 4);

  for (double t : knots) {
    Eigen::VectorXd probe(2);
    probe << t - 1e-9, t + 1e-9;
    const Eigen::MatrixXd b = rcs_basis(probe, knots);
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      CHECK(b(0, j) == doctest::Approx(b(1, j)).scale(1).epsilon(1e-6));
  }
}
