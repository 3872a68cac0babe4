#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gcml {

/// Soft-margin RBF SVM plus a Platt sigmoid mapping decision values to
/// probabilities. coef holds alpha_i * s_i (signed labels) for each stored
/// support row.
struct SvmRbfFit {
    Eigen::MatrixXd support_z;
    Eigen::VectorXd coef;
    double b = 0.0;
    double gamma = 1.0;
    double platt_a = 0.0;
    double platt_b = 0.0;
    bool converged = false;
    Eigen::VectorXd alpha; // full dual vector, kept for diagnostics/tests
};

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v, double gamma);

/// Dual objective sum(alpha) - 1/2 * sum_ij alpha_i alpha_j s_i s_j K_ij.
double svm_dual_objective(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& s,
                          const Eigen::VectorXd& alpha);

/// gamma = 1 / median of pairwise squared distances between rows of z.
double median_pairwise_gamma(const Eigen::MatrixXd& z);

/// Platt-scaling negative log-likelihood with the prior-adjusted targets
/// t = (N+ + 1)/(N+ + 2) and 1/(N- + 2); p = 1/(1+exp(a*f + b)).
double platt_objective(const Eigen::VectorXd& decision, const Eigen::VectorXd& y, double a,
                       double b);
Eigen::Vector2d platt_grad(const Eigen::VectorXd& decision, const Eigen::VectorXd& y, double a,
                           double b);

/// Robust Newton fit of the Platt sigmoid; returns (a, b).
std::pair<double, double> fit_platt(const Eigen::VectorXd& decision, const Eigen::VectorXd& y);

/// SMO solver with an error cache, deterministic second-choice heuristic
/// (largest |E1-E2|, ties to the lowest index), KKT tolerance 1e-3, at most
/// max_passes outer passes. Throws DegenerateOutcome when y is constant.
SvmRbfFit fit_svm_rbf(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double cost,
                      double gamma, double kkt_tol = 1e-3, int max_passes = 10000);

double svm_decision(const SvmRbfFit& fit, const Eigen::VectorXd& z_row);
double svm_predict_proba(const SvmRbfFit& fit, const Eigen::VectorXd& z_row);

} // namespace gcml
