#include "transport/glm.hpp"

#include <cmath>
#include <string>

#include "transport/errors.hpp"
#include "transport/stats.hpp"

namespace transport {

namespace {

Eigen::VectorXd expanded_weights(const Eigen::MatrixXd& design,
                                 const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& weights) {
  if (design.rows() != y.size())
    throw DimensionMismatch("design and response row counts differ");
  if (design.rows() == 0) throw InvalidArgument("cannot fit on an empty sample");
  if (!design.allFinite()) throw InvalidArgument("design matrix must be finite");
  if (!y.allFinite()) throw InvalidArgument("response must be finite");
  if (weights.size() == 0) return Eigen::VectorXd::Ones(design.rows());
  if (weights.size() != design.rows())
    throw DimensionMismatch("weights and response row counts differ");
  bool any_positive = false;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0)
      throw InvalidArgument("fit weights must be finite and nonnegative");
    any_positive = any_positive || weights[i] > 0.0;
  }
  if (!any_positive) throw ZeroWeightSum("all fit weights are zero");
  return weights;
}

// Core WLS solve on the sqrt-weighted design; shared by the linear fit and
// every IRLS step.
Eigen::VectorXd wls_coefficients(const Eigen::MatrixXd& design,
                                 const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& weights) {
  const Eigen::VectorXd root = weights.cwiseSqrt();
  const Eigen::MatrixXd xw = root.asDiagonal() * design;
  const Eigen::VectorXd yw = root.cwiseProduct(y);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xw);
  if (qr.rank() < design.cols())
    throw RankDeficient("weighted design has rank " + std::to_string(qr.rank()) +
                        " < " + std::to_string(design.cols()) + " columns");
  return qr.solve(yw);
}

// Weighted negative log-likelihood of a logistic model, evaluated stably.
double logistic_nll(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& weights,
                    const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = design * beta;
  double nll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double e = eta[i];
    // log(1 + exp(e)) - y * e without overflow
    const double log1pexp = std::max(e, 0.0) + std::log1p(std::exp(-std::abs(e)));
    nll += weights[i] * (log1pexp - y[i] * e);
  }
  return nll;
}

}  // namespace

Eigen::VectorXd FittedGlm::linear_predictor(const Eigen::MatrixXd& design) const {
  if (design.cols() != coefficients.size())
    throw DimensionMismatch("prediction design has wrong number of columns");
  return design * coefficients;
}

Eigen::VectorXd FittedGlm::predict(const Eigen::MatrixXd& design) const {
  Eigen::VectorXd eta = linear_predictor(design);
  if (link == Link::identity) return eta;
  for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = expit(eta[i]);
  return eta;
}

FittedGlm fit_linear(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& weights) {
  const Eigen::VectorXd w = expanded_weights(design, y, weights);
  FittedGlm fit;
  fit.link = Link::identity;
  fit.fit_weights = w;
  fit.coefficients = wls_coefficients(design, y, w);
  fit.converged = true;
  fit.iterations = 1;
  const Eigen::VectorXd residual = y - design * fit.coefficients;
  fit.max_score_residual =
      (design.transpose() * w.cwiseProduct(residual)).lpNorm<Eigen::Infinity>();
  return fit;
}

FittedGlm fit_logistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& weights,
                       const GlmOptions& options) {
  const Eigen::VectorXd w = expanded_weights(design, y, weights);
  double weighted_ones = 0.0, weighted_zeros = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0)
      throw InvalidArgument("logistic response must be coded 0/1");
    weighted_ones += w[i] * y[i];
    weighted_zeros += w[i] * (1.0 - y[i]);
  }
  if (weighted_ones == 0.0 || weighted_zeros == 0.0)
    throw OneClassOnly("logistic response has a single class");

  const double score_scale =
      (design.transpose() * w.cwiseProduct(y)).lpNorm<Eigen::Infinity>();
  const double score_threshold = options.score_tolerance * (1.0 + score_scale);

  FittedGlm fit;
  fit.link = Link::logit;
  fit.fit_weights = w;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(design.cols());
  double objective = logistic_nll(design, y, w, beta);
  const Eigen::Index n = design.rows();
  Eigen::VectorXd mu(n), irls_w(n), z(n);

  for (int it = 1; it <= options.max_iterations; ++it) {
    fit.iterations = it;
    const Eigen::VectorXd eta = design * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      mu[i] = expit(eta[i]);
      const double v = std::max(mu[i] * (1.0 - mu[i]), 1e-10);
      irls_w[i] = w[i] * v;
      z[i] = eta[i] + (y[i] - mu[i]) / v;
    }
    Eigen::VectorXd proposal = wls_coefficients(design, z, irls_w);

    // Halve the step until the weighted negative log-likelihood stops
    // increasing (guards oscillation under near-separation).
    double new_objective = logistic_nll(design, y, w, proposal);
    int halvings = 0;
    while (new_objective > objective + 1e-12 * (1.0 + std::abs(objective)) &&
           halvings < options.max_step_halvings) {
      proposal = 0.5 * (proposal + beta);
      new_objective = logistic_nll(design, y, w, proposal);
      ++halvings;
    }

    const double step = (proposal - beta).lpNorm<Eigen::Infinity>();
    beta = proposal;
    objective = new_objective;

    const Eigen::VectorXd fitted = design * beta;
    Eigen::VectorXd score_residual = Eigen::VectorXd::Zero(design.cols());
    for (Eigen::Index i = 0; i < n; ++i)
      score_residual += w[i] * (y[i] - expit(fitted[i])) * design.row(i).transpose();
    fit.max_score_residual = score_residual.lpNorm<Eigen::Infinity>();

    if (step < options.coef_tolerance &&
        fit.max_score_residual <= score_threshold) {
      fit.converged = true;
      break;
    }
  }

  fit.coefficients = beta;
  const Eigen::VectorXd eta = design * beta;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (w[i] <= 0.0) continue;
    const double p = expit(eta[i]);
    if (p < options.separation_probability ||
        p > 1.0 - options.separation_probability) {
      fit.separation_suspected = true;
      break;
    }
  }

  if (!fit.converged && options.error_on_nonconvergence)
    throw NotConverged("logistic fit did not converge in " +
                       std::to_string(options.max_iterations) + " iterations");
  return fit;
}

}  // namespace transport
