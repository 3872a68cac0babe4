#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace gcml {

/// One-hidden-layer network with logistic activations in both layers.
/// w1 is h x (q+1) with the unit biases in column 0; w2 has the output bias
/// first, then one weight per hidden unit.
struct NeuralNetFit {
    Eigen::MatrixXd w1;
    Eigen::VectorXd w2;
    bool converged = false;
    int epochs = 0;
    double final_loss = 0.0;
};

/// Loss and gradient in packed-parameter form (w1 row-major, then w2), for
/// the optimizer and the finite-difference tests. Loss is mean cross-entropy
/// plus (decay/2) * sum of squared non-bias weights.
double nn_loss(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
               int hidden, double decay);
Eigen::VectorXd nn_grad(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& theta, int hidden, double decay);

Eigen::VectorXd nn_pack(const NeuralNetFit& fit);
void nn_unpack(const Eigen::VectorXd& theta, int hidden, Eigen::Index q, Eigen::MatrixXd& w1,
               Eigen::VectorXd& w2);

/// Full-batch gradient descent with Armijo backtracking, max 500 epochs,
/// stop on relative loss change < 1e-8. Weights start uniform in [-0.5, 0.5]
/// drawn from `seed`.
NeuralNetFit fit_neural_net(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, int hidden,
                            double decay, std::uint64_t seed, int max_epochs = 500,
                            double rel_tol = 1e-8);

double nn_predict(const NeuralNetFit& fit, const Eigen::VectorXd& z_row);

} // namespace gcml
