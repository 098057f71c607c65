#include "transport/design.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "transport/errors.hpp"
#include "transport/stats.hpp"

namespace transport {

namespace {

// Default knot quantiles per knot count.
const std::vector<double>& knot_probs(int k) {
  static const std::map<int, std::vector<double>> table = {
      {3, {0.10, 0.50, 0.90}},
      {4, {0.05, 0.35, 0.65, 0.95}},
      {5, {0.05, 0.275, 0.50, 0.725, 0.95}},
      {6, {0.05, 0.23, 0.41, 0.59, 0.77, 0.95}},
      {7, {0.025, 0.1833, 0.3417, 0.50, 0.6583, 0.8167, 0.975}},
  };
  auto it = table.find(k);
  if (it == table.end())
    throw InvalidArgument("spline knot count must be between 3 and 7");
  return it->second;
}

const Eigen::VectorXd& require_column(const StudyDataset& data,
                                      const std::string& name,
                                      Eigen::VectorXd& storage) {
  const int j = data.covariate_index(name);
  if (j < 0) throw UnknownColumn("unknown covariate '" + name + "'");
  storage = data.x.col(j);
  for (Eigen::Index i = 0; i < storage.size(); ++i)
    if (!std::isfinite(storage[i]))
      throw MissingValue("covariate '" + name + "' missing in row " +
                         std::to_string(i));
  return storage;
}

}  // namespace

std::vector<double> choose_knots(const std::vector<double>& values, int k) {
  const auto& probs = knot_probs(k);
  if (static_cast<int>(values.size()) < k)
    throw TooFewDistinctValues("need at least " + std::to_string(k) +
                               " values for " + std::to_string(k) + " knots");
  std::set<double> distinct(values.begin(), values.end());
  if (static_cast<int>(distinct.size()) < k)
    throw TooFewDistinctValues("need at least " + std::to_string(k) +
                               " distinct values for " + std::to_string(k) +
                               " knots");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> knots;
  knots.reserve(probs.size());
  for (double p : probs) knots.push_back(quantile_sorted(sorted, p));
  for (std::size_t j = 1; j < knots.size(); ++j)
    if (!(knots[j] > knots[j - 1]))
      throw TooFewDistinctValues(
          "tied knot quantiles; too many duplicate values");
  return knots;
}

Eigen::MatrixXd rcs_basis(const Eigen::VectorXd& x,
                          const std::vector<double>& knots) {
  const int k = static_cast<int>(knots.size());
  if (k < 3) throw InvalidArgument("restricted cubic spline needs >= 3 knots");
  for (int j = 1; j < k; ++j)
    if (!(knots[j] > knots[j - 1]))
      throw InvalidArgument("knots must be strictly increasing");

  const double span = knots[k - 1] - knots[0];
  const double scale = span * span;
  const double t_last = knots[k - 1];
  const double t_penult = knots[k - 2];
  const double denom = t_last - t_penult;
  auto cube_plus = [](double v) { return v > 0.0 ? v * v * v : 0.0; };

  Eigen::MatrixXd basis(x.size(), k - 1);
  basis.col(0) = x;
  for (int j = 0; j < k - 2; ++j) {
    const double t_j = knots[j];
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double v = cube_plus(x[i] - t_j) -
                       cube_plus(x[i] - t_penult) * (t_last - t_j) / denom +
                       cube_plus(x[i] - t_last) * (t_penult - t_j) / denom;
      basis(i, j + 1) = v / scale;
    }
  }
  return basis;
}

Eigen::Index design_width(const ModelSpec& spec) {
  Eigen::Index width = spec.intercept ? 1 : 0;
  for (const Term& term : spec.terms) {
    if (std::holds_alternative<SplineTerm>(term))
      width += std::get<SplineTerm>(term).n_knots - 1;
    else
      width += 1;
  }
  return width;
}

DesignMatrix build_design(const StudyDataset& data, const ModelSpec& spec,
                          KnotBank& bank) {
  const Eigen::Index n = data.n();
  DesignMatrix out;
  out.x.resize(n, design_width(spec));
  Eigen::Index col = 0;
  if (spec.intercept) {
    out.x.col(col++).setOnes();
    out.column_names.push_back("(intercept)");
  }

  Eigen::VectorXd storage, storage2;
  for (const Term& term : spec.terms) {
    if (const auto* main = std::get_if<MainEffect>(&term)) {
      out.x.col(col++) = require_column(data, main->name, storage);
      out.column_names.push_back(main->name);
    } else if (const auto* inter = std::get_if<Interaction>(&term)) {
      const Eigen::VectorXd& left = require_column(data, inter->left, storage);
      const Eigen::VectorXd& right =
          require_column(data, inter->right, storage2);
      out.x.col(col++) = left.cwiseProduct(right);
      out.column_names.push_back(inter->left + "*" + inter->right);
    } else {
      const auto& spline = std::get<SplineTerm>(term);
      const Eigen::VectorXd& values =
          require_column(data, spline.name, storage);
      const std::string key = KnotBank::key(spline.name, spline.n_knots);
      auto it = bank.entries.find(key);
      if (it == bank.entries.end()) {
        std::vector<double> column(values.data(), values.data() + values.size());
        it = bank.entries.emplace(key, choose_knots(column, spline.n_knots))
                 .first;
      }
      const Eigen::MatrixXd basis = rcs_basis(values, it->second);
      out.x.middleCols(col, basis.cols()) = basis;
      out.column_names.push_back(spline.name);
      for (int d = 1; d < basis.cols(); ++d)
        out.column_names.push_back(spline.name + std::string(d, '\''));
      col += basis.cols();
    }
  }
  return out;
}

}  // namespace transport
