#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace gcml {

struct SlWeightResult {
    Eigen::VectorXd w; // simplex weights over the columns of p
    double cv_auc = 0.5;
};

/// Mean over folds of the AUC of the blended score p*w, evaluated on each
/// fold's rows. Folds whose labels are single-class contribute 0.5.
double sl_cv_auc(const Eigen::MatrixXd& p, const Eigen::VectorXd& y,
                 const std::vector<int>& fold_of, int k_folds, const Eigen::VectorXd& w);

/// Maximizes sl_cv_auc over the simplex. Every pure vertex and the uniform
/// blend are always evaluated; K <= 3 adds an exhaustive coarse grid (step
/// 0.01 for K=2, 0.02 for K=3), larger K runs softmax-parameterized
/// Nelder-Mead from 5 deterministic restarts. Ties keep the earliest
/// candidate, so single-learner solutions win over equivalent blends.
SlWeightResult optimize_sl_weights(const Eigen::MatrixXd& p, const Eigen::VectorXd& y,
                                   const std::vector<int>& fold_of, int k_folds,
                                   std::uint64_t seed);

} // namespace gcml
