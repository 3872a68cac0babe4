#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gcml {

struct ElasticnetSpec {
    double alpha = 1.0;  // L1 mixing; 1 = Lasso
    double lambda = 0.0; // penalty strength
};

struct ElasticnetFit {
    double b0 = 0.0;
    Eigen::VectorXd beta;
    bool converged = false;
    int sweeps = 0;
    // True penalized objective after each sweep when tracing is on; the
    // solver recenters its quadratic majorizer every sweep, which makes this
    // sequence non-increasing.
    std::vector<double> trace;
};

/// Penalized objective (1/n)*NLL + lambda*(alpha*||beta||_1 + (1-alpha)/2*||beta||_2^2),
/// intercept unpenalized.
double elasticnet_objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double b0,
                            const Eigen::VectorXd& beta, const ElasticnetSpec& spec);

/// Smallest lambda that zeroes every penalized coefficient: max_j |z_j'(y-ybar)| / (n*alpha).
double elasticnet_lambda_max(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double alpha);

/// length values log-spaced from lambda_max down to ratio*lambda_max.
std::vector<double> lambda_grid(double lambda_max, int length, double ratio);

/// Cyclic coordinate descent on a quadratic majorizer of the logistic loss
/// (curvature bound 1/4, recentered each sweep), soft-thresholding for the L1
/// part, active-set iteration, warm-startable. tol is relative: the solver
/// stops once no single update changes the quadratic objective by more than
/// tol times the intercept-only loss. Columns of z are expected standardized;
/// the solver works either way but the penalty is then scale-dependent.
ElasticnetFit fit_elasticnet_cd(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                const ElasticnetSpec& spec, const ElasticnetFit* warm = nullptr,
                                double tol = 1e-7, int max_sweeps = 100000,
                                bool record_trace = false);

} // namespace gcml
