#pragma once

#include <Eigen/Dense>

namespace transport {

enum class Link { identity, logit };

struct GlmOptions {
  int max_iterations = 100;
  // Converged when the coefficient step is below coef_tolerance in infinity
  // norm AND the score residual is at most
  //   score_tolerance * (1 + ||X' diag(w) y||_inf).
  double coef_tolerance = 1e-8;
  double score_tolerance = 1e-8;
  int max_step_halvings = 20;
  bool error_on_nonconvergence = true;
  // Fitted probabilities this close to 0 or 1 raise the separation flag.
  double separation_probability = 1e-10;
};

struct FittedGlm {
  Link link = Link::identity;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd fit_weights;  // prior weights actually used (ones if omitted)
  bool converged = false;
  int iterations = 0;
  // Infinity norm of X' (w .* (y - mu)) at the returned coefficients.
  double max_score_residual = 0.0;
  bool separation_suspected = false;

  Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& design) const;
  // Response scale: identity returns the linear predictor, logit applies the
  // inverse link.
  Eigen::VectorXd predict(const Eigen::MatrixXd& design) const;
};

// Weighted least squares through column-pivoted QR on the sqrt-weighted
// design.  Weights must be finite and nonnegative with at least one positive
// entry; zero-weight rows do not contribute.  A weighted design without full
// column rank raises RankDeficient.
FittedGlm fit_linear(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& weights = Eigen::VectorXd());

// Weighted logistic regression by iteratively reweighted least squares with
// step halving.  Weights act as quasi-likelihood prior weights and may be
// non-integer.  y must be coded 0/1 and both classes must carry positive
// weight.
FittedGlm fit_logistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& weights = Eigen::VectorXd(),
                       const GlmOptions& options = GlmOptions());

}  // namespace transport
