#pragma once

#include <Eigen/Dense>

namespace gcml {

/// Unpenalized logistic fit. beta[0] is the intercept; beta[1..q] follow the
/// columns of z. separation is flagged when the optimizer stalls with some
/// |coefficient| > 30, which happens under (quasi-)separated data.
struct LogisticFit {
    Eigen::VectorXd beta;
    bool converged = false;
    bool separation = false;
    int iterations = 0;
};

/// Maximum likelihood by iteratively reweighted least squares. z has no
/// intercept column (added internally). Throws DegenerateOutcome when y is
/// constant and NumericError when the weighted normal equations are singular
/// beyond recovery.
LogisticFit fit_logistic_irls(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                              double tol = 1e-8, int max_iter = 100);

/// logistic(eta) with guarded exponent.
double sigmoid(double eta);

/// Average negative log-likelihood of a logistic model, used by the
/// penalized solver and tests.
double logistic_nll(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& beta);

} // namespace gcml
