#include "gcml/neural_net.hpp"

#include <cmath>

#include "gcml/errors.hpp"
#include "gcml/logistic.hpp"
#include "gcml/rng.hpp"

namespace gcml {

namespace {

Eigen::Index theta_size(int hidden, Eigen::Index q) {
    return static_cast<Eigen::Index>(hidden) * (q + 1) + hidden + 1;
}

// Forward pass shared by loss and gradient. H gets the hidden activations,
// f the output pre-activations.
void forward(const Eigen::MatrixXd& z, const Eigen::MatrixXd& w1, const Eigen::VectorXd& w2,
             Eigen::MatrixXd& h, Eigen::VectorXd& f) {
    const Eigen::Index n = z.rows();
    const int hidden = static_cast<int>(w1.rows());
    h.noalias() = z * w1.rightCols(z.cols()).transpose();
    h.rowwise() += w1.col(0).transpose();
    for (Eigen::Index i = 0; i < n; ++i)
        for (int j = 0; j < hidden; ++j) h(i, j) = sigmoid(h(i, j));
    f.noalias() = h * w2.tail(hidden);
    f.array() += w2[0];
}

double penalty(const Eigen::MatrixXd& w1, const Eigen::VectorXd& w2, double decay) {
    double ss = w1.rightCols(w1.cols() - 1).squaredNorm() + w2.tail(w2.size() - 1).squaredNorm();
    return 0.5 * decay * ss;
}

} // namespace

Eigen::VectorXd nn_pack(const NeuralNetFit& fit) {
    const int hidden = static_cast<int>(fit.w1.rows());
    const Eigen::Index q = fit.w1.cols() - 1;
    Eigen::VectorXd theta(theta_size(hidden, q));
    Eigen::Index k = 0;
    for (int j = 0; j < hidden; ++j)
        for (Eigen::Index c = 0; c <= q; ++c) theta[k++] = fit.w1(j, c);
    for (Eigen::Index c = 0; c <= hidden; ++c) theta[k++] = fit.w2[c];
    return theta;
}

void nn_unpack(const Eigen::VectorXd& theta, int hidden, Eigen::Index q, Eigen::MatrixXd& w1,
               Eigen::VectorXd& w2) {
    if (theta.size() != theta_size(hidden, q)) throw NumericError("bad packed parameter size");
    w1.resize(hidden, q + 1);
    w2.resize(hidden + 1);
    Eigen::Index k = 0;
    for (int j = 0; j < hidden; ++j)
        for (Eigen::Index c = 0; c <= q; ++c) w1(j, c) = theta[k++];
    for (Eigen::Index c = 0; c <= hidden; ++c) w2[c] = theta[k++];
}

double nn_loss(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
               int hidden, double decay) {
    Eigen::MatrixXd w1;
    Eigen::VectorXd w2;
    nn_unpack(theta, hidden, z.cols(), w1, w2);
    Eigen::MatrixXd h;
    Eigen::VectorXd f;
    forward(z, w1, w2, h, f);
    const Eigen::Index n = z.rows();
    double ce = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double fi = f[i];
        double log1pexp = fi > 0 ? fi + std::log1p(std::exp(-fi)) : std::log1p(std::exp(fi));
        ce += log1pexp - y[i] * fi;
    }
    return ce / static_cast<double>(n) + penalty(w1, w2, decay);
}

Eigen::VectorXd nn_grad(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& theta, int hidden, double decay) {
    Eigen::MatrixXd w1;
    Eigen::VectorXd w2;
    nn_unpack(theta, hidden, z.cols(), w1, w2);
    Eigen::MatrixXd h;
    Eigen::VectorXd f;
    forward(z, w1, w2, h, f);
    const Eigen::Index n = z.rows();
    const Eigen::Index q = z.cols();

    Eigen::VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = (sigmoid(f[i]) - y[i]) / static_cast<double>(n);

    Eigen::VectorXd g2(hidden + 1);
    g2[0] = d.sum();
    g2.tail(hidden).noalias() = h.transpose() * d;
    g2.tail(hidden) += decay * w2.tail(hidden);

    Eigen::MatrixXd dh = d * w2.tail(hidden).transpose();          // n x hidden
    dh.array() *= h.array() * (1.0 - h.array());                   // through the sigmoid
    Eigen::MatrixXd g1(hidden, q + 1);
    g1.col(0) = dh.colwise().sum().transpose();
    g1.rightCols(q).noalias() = dh.transpose() * z;
    g1.rightCols(q) += decay * w1.rightCols(q);

    NeuralNetFit packed;
    packed.w1 = std::move(g1);
    packed.w2 = std::move(g2);
    return nn_pack(packed);
}

NeuralNetFit fit_neural_net(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, int hidden,
                            double decay, std::uint64_t seed, int max_epochs, double rel_tol) {
    if (hidden < 1) throw NumericError("hidden size must be >= 1");
    const Eigen::Index q = z.cols();
    double ybar = y.mean();
    if (ybar <= 0.0 || ybar >= 1.0) throw DegenerateOutcome("outcome is constant");

    RngStream rng(seed);
    Eigen::VectorXd theta(theta_size(hidden, q));
    for (Eigen::Index k = 0; k < theta.size(); ++k) theta[k] = rng.uniform01() - 0.5;

    double loss = nn_loss(z, y, theta, hidden, decay);
    NeuralNetFit fit;
    fit.converged = false;
    for (int epoch = 0; epoch < max_epochs; ++epoch) {
        fit.epochs = epoch + 1;
        Eigen::VectorXd g = nn_grad(z, y, theta, hidden, decay);
        double gnorm2 = g.squaredNorm();
        if (gnorm2 == 0.0) {
            fit.converged = true;
            break;
        }
        double step = 1.0;
        double new_loss = loss;
        bool accepted = false;
        for (int half = 0; half < 50; ++half) {
            Eigen::VectorXd cand = theta - step * g;
            double cand_loss = nn_loss(z, y, cand, hidden, decay);
            if (cand_loss <= loss - 1e-4 * step * gnorm2) {
                theta = std::move(cand);
                new_loss = cand_loss;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // line search exhausted; keep best so far
        if (std::abs(loss - new_loss) <= rel_tol * std::max(1.0, std::abs(loss))) {
            loss = new_loss;
            fit.converged = true;
            break;
        }
        loss = new_loss;
    }
    fit.final_loss = loss;
    nn_unpack(theta, hidden, q, fit.w1, fit.w2);
    return fit;
}

double nn_predict(const NeuralNetFit& fit, const Eigen::VectorXd& z_row) {
    const int hidden = static_cast<int>(fit.w1.rows());
    double f = fit.w2[0];
    for (int j = 0; j < hidden; ++j) {
        double pre = fit.w1(j, 0) + fit.w1.row(j).tail(z_row.size()).dot(z_row);
        f += fit.w2[j + 1] * sigmoid(pre);
    }
    return sigmoid(f);
}

} // namespace gcml
