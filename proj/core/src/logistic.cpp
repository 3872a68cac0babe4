#include "gcml/logistic.hpp"

#include <cmath>

#include "gcml/errors.hpp"

namespace gcml {

double sigmoid(double eta) {
    if (eta >= 0.0) {
        double e = std::exp(-eta);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(eta);
    return e / (1.0 + e);
}

double logistic_nll(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& beta) {
    const Eigen::Index n = z.rows();
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(n, beta[0]);
    eta.noalias() += z * beta.tail(beta.size() - 1);
    double nll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        // log(1+exp(eta)) - y*eta, computed stably
        double e = eta[i];
        double log1pexp = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
        nll += log1pexp - y[i] * e;
    }
    return nll / static_cast<double>(n);
}

LogisticFit fit_logistic_irls(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                              double tol, int max_iter) {
    const Eigen::Index n = z.rows();
    const Eigen::Index q = z.cols();
    if (n < 2) throw DataError("logistic fit needs at least 2 rows");
    double ybar = y.mean();
    if (ybar <= 0.0 || ybar >= 1.0) throw DegenerateOutcome("outcome is constant");

    Eigen::MatrixXd x(n, q + 1);
    x.col(0).setOnes();
    if (q > 0) x.rightCols(q) = z;

    LogisticFit fit;
    fit.beta = Eigen::VectorXd::Zero(q + 1);
    fit.beta[0] = std::log(ybar / (1.0 - ybar));

    Eigen::VectorXd eta(n), mu(n), w(n), working(n);
    for (int iter = 0; iter < max_iter; ++iter) {
        fit.iterations = iter + 1;
        eta.noalias() = x * fit.beta;
        for (Eigen::Index i = 0; i < n; ++i) {
            mu[i] = sigmoid(eta[i]);
            double wi = mu[i] * (1.0 - mu[i]);
            w[i] = std::max(wi, 1e-10);
            working[i] = eta[i] + (y[i] - mu[i]) / w[i];
        }
        Eigen::MatrixXd xtwx = x.transpose() * w.asDiagonal() * x;
        Eigen::VectorXd xtwz = x.transpose() * (w.asDiagonal() * working);
        Eigen::LDLT<Eigen::MatrixXd> solver(xtwx);
        Eigen::VectorXd d = solver.vectorD().cwiseAbs();
        if (solver.info() != Eigen::Success || d.minCoeff() < 1e-12 * d.maxCoeff())
            throw NumericError("singular weighted normal equations in logistic fit");
        Eigen::VectorXd next = solver.solve(xtwz);
        if (!next.allFinite()) throw NumericError("non-finite logistic update");
        double change = (next - fit.beta).cwiseAbs().maxCoeff();
        fit.beta = next;
        if (change < tol) {
            fit.converged = true;
            break;
        }
    }
    if (fit.beta.cwiseAbs().maxCoeff() > 30.0) fit.separation = true;
    return fit;
}

} // namespace gcml
