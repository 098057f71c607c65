#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "transport/dataset.hpp"

namespace transport {

// Model terms.  A spline term expands to its linear column plus k-2 restricted
// cubic basis columns; an interaction is the elementwise product of two raw
// covariates.
struct MainEffect {
  std::string name;
};
struct Interaction {
  std::string left, right;
};
struct SplineTerm {
  std::string name;
  int n_knots = 5;
};
using Term = std::variant<MainEffect, Interaction, SplineTerm>;

struct ModelSpec {
  std::vector<Term> terms;
  bool intercept = true;
};

// Knot locations per (covariate, knot-count) pair.  Populated on first use and
// then reused verbatim, so that bootstrap replicates and predictions share the
// bases chosen once on the full data.
struct KnotBank {
  std::map<std::string, std::vector<double>> entries;

  static std::string key(const std::string& name, int n_knots) {
    return name + "@" + std::to_string(n_knots);
  }
  const std::vector<double>* find(const std::string& name, int n_knots) const {
    auto it = entries.find(key(name, n_knots));
    return it == entries.end() ? nullptr : &it->second;
  }
};

// Quantile-based knot placement for a restricted cubic spline with k knots
// (3 <= k <= 7), using the conventional default quantiles for each k.
// Requires at least k distinct values and strictly increasing knots.
std::vector<double> choose_knots(const std::vector<double>& values, int k);

// Restricted cubic spline basis at fixed knots: k-1 columns, the first linear
// in x, the rest truncated-power terms scaled by the squared overall knot
// span.  The function is linear beyond the boundary knots.
Eigen::MatrixXd rcs_basis(const Eigen::VectorXd& x,
                          const std::vector<double>& knots);

struct DesignMatrix {
  Eigen::MatrixXd x;
  std::vector<std::string> column_names;
};

// Expands a spec against the dataset.  Column order is deterministic:
// intercept first, then each term's columns in spec order.  Spline knots are
// taken from `bank` when present, otherwise computed from the full covariate
// column and recorded in `bank`.
DesignMatrix build_design(const StudyDataset& data, const ModelSpec& spec,
                          KnotBank& bank);

// Total column count implied by a spec (intercept + term widths).
Eigen::Index design_width(const ModelSpec& spec);

}  // namespace transport
