#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "gcml/rng.hpp"
#include "gcml/super_learner.hpp"

namespace {

// Reference fold-averaged AUC: plain O(n^2) pairwise concordance per fold,
// ties counted half, single-class folds contributing 0.5.
double ref_cv_auc(const Eigen::MatrixXd& p, const Eigen::VectorXd& y,
                  const std::vector<int>& fold_of, int k, const Eigen::VectorXd& w) {
    Eigen::VectorXd score = p * w;
    double total = 0.0;
    for (int f = 0; f < k; ++f) {
        std::vector<Eigen::Index> rows;
        for (std::size_t i = 0; i < fold_of.size(); ++i)
            if (fold_of[i] == f) rows.push_back(static_cast<Eigen::Index>(i));
        double concordant = 0.0;
        long pairs = 0;
        bool has0 = false, has1 = false;
        for (Eigen::Index i : rows) (y[i] == 1.0 ? has1 : has0) = true;
        if (!has0 || !has1) {
            total += 0.5;
            continue;
        }
        for (Eigen::Index i : rows)
            for (Eigen::Index j : rows) {
                if (y[i] != 1.0 || y[j] != 0.0) continue;
                ++pairs;
                if (score[i] > score[j])
                    concordant += 1.0;
                else if (score[i] == score[j])
                    concordant += 0.5;
            }
        total += concordant / static_cast<double>(pairs);
    }
    return total / static_cast<double>(k);
}

struct Setup {
    Eigen::MatrixXd p;
    Eigen::VectorXd y;
    std::vector<int> fold_of;
    int k = 3;
};

Setup make_setup(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
    gcml::RngStream rng(seed);
    Setup s;
    s.p.resize(n, m);
    s.y.resize(n);
    s.fold_of.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double signal = rng.normal();
        s.y[i] = signal + 0.8 * rng.normal() > 0.0 ? 1.0 : 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            // Each column sees the signal with its own noise level, so blends
            // genuinely help.
            double noise = (0.5 + 0.4 * static_cast<double>(j)) * rng.normal();
            s.p(i, j) = 1.0 / (1.0 + std::exp(-(signal + noise)));
        }
        s.fold_of[static_cast<std::size_t>(i)] = static_cast<int>(i) % s.k;
    }
    return s;
}

} // namespace

TEST_CASE("sl_cv_auc matches the pairwise reference") {
    Setup s = make_setup(60, 2, 71);
    for (double w0 : {0.0, 0.3, 1.0}) {
        Eigen::VectorXd w(2);
        w << w0, 1.0 - w0;
        CHECK(gcml::sl_cv_auc(s.p, s.y, s.fold_of, s.k, w) ==
              doctest::Approx(ref_cv_auc(s.p, s.y, s.fold_of, s.k, w)).epsilon(1e-12));
    }
}

TEST_CASE("single-class folds contribute one half") {
    Eigen::MatrixXd p(4, 1);
    p << 0.2, 0.4, 0.6, 0.8;
    Eigen::VectorXd y(4);
    y << 1.0, 1.0, 0.0, 1.0; // fold 0 holds rows 0,1: single-class
    std::vector<int> fold_of = {0, 0, 1, 1};
    Eigen::VectorXd w = Eigen::VectorXd::Ones(1);
    // Fold 1 ranks the event above the non-event: AUC 1. Fold 0 is 0.5.
    CHECK(gcml::sl_cv_auc(p, y, fold_of, 2, w) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("two-column weights match an exhaustive scan") {
    Setup s = make_setup(90, 2, 72);
    gcml::SlWeightResult res = gcml::optimize_sl_weights(s.p, s.y, s.fold_of, s.k, 9001);

    double best = -1.0;
    for (int i = 0; i <= 100; ++i) {
        Eigen::VectorXd w(2);
        w << static_cast<double>(i) / 100.0, 1.0 - static_cast<double>(i) / 100.0;
        best = std::max(best, ref_cv_auc(s.p, s.y, s.fold_of, s.k, w));
    }
    CHECK(res.cv_auc == doctest::Approx(best).epsilon(1e-12));
    CHECK(ref_cv_auc(s.p, s.y, s.fold_of, s.k, res.w) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("three-column weights cover the coarse simplex grid") {
    Setup s = make_setup(75, 3, 73);
    gcml::SlWeightResult res = gcml::optimize_sl_weights(s.p, s.y, s.fold_of, s.k, 9002);

    double best = -1.0;
    for (int i = 0; i <= 50; ++i)
        for (int j = 0; j + i <= 50; ++j) {
            Eigen::VectorXd w(3);
            w << 0.02 * i, 0.02 * j, 1.0 - 0.02 * (i + j);
            best = std::max(best, ref_cv_auc(s.p, s.y, s.fold_of, s.k, w));
        }
    CHECK(res.cv_auc >= best - 1e-12);
}

TEST_CASE("weights live on the simplex and dominate the pure columns") {
    for (Eigen::Index m : {2, 3, 4, 5}) {
        Setup s = make_setup(80, m, 74 + static_cast<std::uint64_t>(m));
        gcml::SlWeightResult res = gcml::optimize_sl_weights(s.p, s.y, s.fold_of, s.k, 555);
        CHECK(res.w.sum() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(res.w.minCoeff() >= 0.0);

        for (Eigen::Index j = 0; j < m; ++j) {
            Eigen::VectorXd pure = Eigen::VectorXd::Zero(m);
            pure[j] = 1.0;
            CHECK(res.cv_auc >= ref_cv_auc(s.p, s.y, s.fold_of, s.k, pure) - 1e-12);
        }
        Eigen::VectorXd uniform =
            Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
        CHECK(res.cv_auc >= ref_cv_auc(s.p, s.y, s.fold_of, s.k, uniform) - 1e-12);

        // Claimed objective value is honest.
        CHECK(res.cv_auc == doctest::Approx(ref_cv_auc(s.p, s.y, s.fold_of, s.k, res.w)).epsilon(1e-12));
    }
}

TEST_CASE("optimization is deterministic in the seed") {
    Setup s = make_setup(70, 4, 79);
    gcml::SlWeightResult a = gcml::optimize_sl_weights(s.p, s.y, s.fold_of, s.k, 42);
    gcml::SlWeightResult b = gcml::optimize_sl_weights(s.p, s.y, s.fold_of, s.k, 42);
    CHECK((a.w - b.w).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.cv_auc == b.cv_auc);
}
