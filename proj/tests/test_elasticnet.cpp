#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "gcml/elasticnet.hpp"
#include "gcml/errors.hpp"
#include "gcml/logistic.hpp"
#include "gcml/rng.hpp"

using gcml::ElasticnetFit;
using gcml::ElasticnetSpec;

namespace {

// Objective written straight from the definition, independent of the
// production helper.
double ref_objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double b0,
                     const Eigen::VectorXd& beta, double lambda, double alpha) {
    double nll = 0.0;
    const Eigen::Index n = z.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        double eta = b0 + beta.dot(z.row(i));
        double mu = 1.0 / (1.0 + std::exp(-eta));
        nll -= y[i] * std::log(mu) + (1.0 - y[i]) * std::log(1.0 - mu);
    }
    nll /= static_cast<double>(n);
    return nll + lambda * (alpha * beta.cwiseAbs().sum() + 0.5 * (1.0 - alpha) * beta.squaredNorm());
}

struct Problem {
    Eigen::MatrixXd z;
    Eigen::VectorXd y;
};

Problem make_problem(Eigen::Index n, Eigen::Index q, std::uint64_t seed) {
    gcml::RngStream rng(seed);
    Problem prob;
    prob.z.resize(n, q);
    prob.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < q; ++j) prob.z(i, j) = rng.normal();
        double eta = -0.2 + 0.9 * prob.z(i, 0) - 0.5 * prob.z(i, std::min<Eigen::Index>(1, q - 1));
        prob.y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-eta))) ? 1.0 : 0.0;
    }
    // Standardize columns the way the design step would.
    for (Eigen::Index j = 0; j < q; ++j) {
        double mean = prob.z.col(j).mean();
        double sd = std::sqrt((prob.z.col(j).array() - mean).square().sum() / static_cast<double>(n));
        prob.z.col(j) = (prob.z.col(j).array() - mean) / sd;
    }
    return prob;
}

} // namespace

TEST_CASE("objective helper matches the definition") {
    Problem prob = make_problem(25, 3, 41);
    Eigen::VectorXd beta(3);
    beta << 0.4, -0.2, 0.0;
    for (double alpha : {1.0, 0.6, 0.0})
        CHECK(gcml::elasticnet_objective(prob.z, prob.y, 0.15, beta, {alpha, 0.07}) ==
              doctest::Approx(ref_objective(prob.z, prob.y, 0.15, beta, 0.07, alpha)).epsilon(1e-12));
}

TEST_CASE("lambda grid is log-spaced with exact endpoints") {
    auto grid = gcml::lambda_grid(0.5, 20, 1e-4);
    REQUIRE(grid.size() == 20);
    CHECK(grid.front() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(grid.back() == doctest::Approx(0.5 * 1e-4).epsilon(1e-10));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(grid[i] < grid[i - 1]);
        // Log spacing means constant ratio between neighbours.
        double ratio = grid[i] / grid[i - 1];
        CHECK(ratio == doctest::Approx(grid[1] / grid[0]).epsilon(1e-10));
    }
    CHECK(gcml::lambda_grid(0.5, 1, 1e-4).size() == 1);
}

TEST_CASE("lambda_max formula and the all-zero boundary") {
    Problem prob = make_problem(60, 4, 42);
    double ybar = prob.y.mean();
    double expected = 0.0;
    for (Eigen::Index j = 0; j < 4; ++j) {
        double dot = std::abs(prob.z.col(j).dot(prob.y - Eigen::VectorXd::Constant(60, ybar)));
        expected = std::max(expected, dot / 60.0);
    }
    for (double alpha : {1.0, 0.5}) {
        double lmax = gcml::elasticnet_lambda_max(prob.z, prob.y, alpha);
        CHECK(lmax == doctest::Approx(expected / alpha).epsilon(1e-12));

        // At and above lambda_max every penalized coefficient is exactly zero
        // and the intercept sits at the empirical logit.
        for (double bump : {1.0, 1.5}) {
            ElasticnetFit fit = gcml::fit_elasticnet_cd(prob.z, prob.y, {alpha, lmax * bump});
            REQUIRE(fit.converged);
            for (Eigen::Index j = 0; j < 4; ++j) CHECK(fit.beta[j] == 0.0);
            CHECK(fit.b0 == doctest::Approx(std::log(ybar / (1.0 - ybar))).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(gcml::elasticnet_lambda_max(prob.z, prob.y, 0.0), gcml::NumericError);
}

TEST_CASE("lambda zero reproduces the unpenalized maximum likelihood fit") {
    Problem prob = make_problem(120, 3, 43);
    gcml::LogisticFit mle = gcml::fit_logistic_irls(prob.z, prob.y);
    REQUIRE(mle.converged);
    for (double alpha : {1.0, 0.3}) {
        ElasticnetFit fit = gcml::fit_elasticnet_cd(prob.z, prob.y, {alpha, 0.0}, nullptr, 1e-10);
        REQUIRE(fit.converged);
        CHECK(std::abs(fit.b0 - mle.beta[0]) < 1e-4);
        for (Eigen::Index j = 0; j < 3; ++j) CHECK(std::abs(fit.beta[j] - mle.beta[j + 1]) < 1e-4);
    }
}

TEST_CASE("solution beats a dense parameter grid around it") {
    // Two predictors plus intercept: coarse scan of [-2,2]^3, then a 0.01
    // step refinement around the best cell, all on the reference objective.
    Problem prob = make_problem(40, 2, 44);
    ElasticnetSpec spec{0.7, 0.05};
    ElasticnetFit fit = gcml::fit_elasticnet_cd(prob.z, prob.y, spec, nullptr, 1e-10);
    REQUIRE(fit.converged);
    double solver_obj = ref_objective(prob.z, prob.y, fit.b0, fit.beta, spec.lambda, spec.alpha);

    double best = 1e300;
    double best_b0 = 0.0, best_b1 = 0.0, best_b2 = 0.0;
    Eigen::VectorXd beta(2);
    for (double b0 = -2.0; b0 <= 2.0; b0 += 0.1)
        for (double b1 = -2.0; b1 <= 2.0; b1 += 0.1)
            for (double b2 = -2.0; b2 <= 2.0; b2 += 0.1) {
                beta << b1, b2;
                double obj = ref_objective(prob.z, prob.y, b0, beta, spec.lambda, spec.alpha);
                if (obj < best) {
                    best = obj;
                    best_b0 = b0;
                    best_b1 = b1;
                    best_b2 = b2;
                }
            }
    for (double b0 = best_b0 - 0.1; b0 <= best_b0 + 0.1; b0 += 0.01)
        for (double b1 = best_b1 - 0.1; b1 <= best_b1 + 0.1; b1 += 0.01)
            for (double b2 = best_b2 - 0.1; b2 <= best_b2 + 0.1; b2 += 0.01) {
                beta << b1, b2;
                best = std::min(best, ref_objective(prob.z, prob.y, b0, beta, spec.lambda, spec.alpha));
            }
    CHECK(solver_obj <= best + 1e-6);
}

TEST_CASE("stationarity conditions hold at the solution") {
    Problem prob = make_problem(90, 5, 45);
    for (auto [alpha, frac] : std::vector<std::pair<double, double>>{{1.0, 0.3}, {0.5, 0.1}}) {
        double lambda = gcml::elasticnet_lambda_max(prob.z, prob.y, alpha) * frac;
        ElasticnetFit fit = gcml::fit_elasticnet_cd(prob.z, prob.y, {alpha, lambda}, nullptr, 1e-10);
        REQUIRE(fit.converged);

        Eigen::VectorXd eta = Eigen::VectorXd::Constant(90, fit.b0) + prob.z * fit.beta;
        Eigen::VectorXd mu = eta.unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
        Eigen::VectorXd g = prob.z.transpose() * (prob.y - mu) / 90.0;
        double l1 = lambda * alpha;
        double l2 = lambda * (1.0 - alpha);
        CHECK(std::abs((prob.y - mu).mean()) < 1e-5);
        bool any_active = false;
        for (Eigen::Index j = 0; j < 5; ++j) {
            if (fit.beta[j] != 0.0) {
                any_active = true;
                double sign = fit.beta[j] > 0.0 ? 1.0 : -1.0;
                CHECK(std::abs(g[j] - l2 * fit.beta[j] - l1 * sign) < 1e-5);
            } else {
                CHECK(std::abs(g[j]) <= l1 + 1e-5);
            }
        }
        CHECK(any_active);
    }
}

TEST_CASE("objective trace is non-increasing sweep by sweep") {
    // Correlated columns at a small lambda exercise the slow regime where
    // the accelerated jumps kick in; the recorded true objective must still
    // never rise.
    gcml::RngStream rng(46);
    const Eigen::Index n = 80, q = 8;
    Eigen::MatrixXd z(n, q);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double base = rng.normal();
        for (Eigen::Index j = 0; j < q; ++j) z(i, j) = 0.8 * base + 0.3 * rng.normal();
        y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-base))) ? 1.0 : 0.0;
    }
    for (Eigen::Index j = 0; j < q; ++j) {
        double mean = z.col(j).mean();
        double sd = std::sqrt((z.col(j).array() - mean).square().sum() / static_cast<double>(n));
        z.col(j) = (z.col(j).array() - mean) / sd;
    }
    double lmax = gcml::elasticnet_lambda_max(z, y, 1.0);
    for (double frac : {1e-4, 0.01, 0.3}) {
        ElasticnetFit fit =
            gcml::fit_elasticnet_cd(z, y, {1.0, lmax * frac}, nullptr, 1e-7, 100000, true);
        REQUIRE(fit.trace.size() == static_cast<std::size_t>(fit.sweeps));
        for (std::size_t s = 1; s < fit.trace.size(); ++s)
            CHECK(fit.trace[s] <= fit.trace[s - 1] + 1e-12);
    }
}

TEST_CASE("warm starts land on the same optimum") {
    Problem prob = make_problem(70, 4, 47);
    double lmax = gcml::elasticnet_lambda_max(prob.z, prob.y, 1.0);
    ElasticnetFit at_high = gcml::fit_elasticnet_cd(prob.z, prob.y, {1.0, lmax * 0.5});
    ElasticnetSpec low{1.0, lmax * 0.05};
    ElasticnetFit warm = gcml::fit_elasticnet_cd(prob.z, prob.y, low, &at_high, 1e-10);
    ElasticnetFit cold = gcml::fit_elasticnet_cd(prob.z, prob.y, low, nullptr, 1e-10);
    REQUIRE(warm.converged);
    REQUIRE(cold.converged);
    double obj_warm = ref_objective(prob.z, prob.y, warm.b0, warm.beta, low.lambda, low.alpha);
    double obj_cold = ref_objective(prob.z, prob.y, cold.b0, cold.beta, low.lambda, low.alpha);
    CHECK(std::abs(obj_warm - obj_cold) < 1e-8);
    CHECK((warm.beta - cold.beta).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("ridge limit shrinks without zeroing") {
    Problem prob = make_problem(80, 3, 48);
    ElasticnetFit mle = gcml::fit_elasticnet_cd(prob.z, prob.y, {0.0, 0.0});
    ElasticnetFit ridge = gcml::fit_elasticnet_cd(prob.z, prob.y, {0.0, 0.5});
    REQUIRE(ridge.converged);
    CHECK(ridge.beta.norm() < mle.beta.norm());
    CHECK(ridge.beta.cwiseAbs().minCoeff() > 0.0);
}

TEST_CASE("invalid arguments and degenerate outcomes throw") {
    Problem prob = make_problem(20, 2, 49);
    CHECK_THROWS_AS(gcml::fit_elasticnet_cd(prob.z, prob.y, {1.0, -0.1}), gcml::NumericError);
    CHECK_THROWS_AS(gcml::fit_elasticnet_cd(prob.z, prob.y, {1.5, 0.1}), gcml::NumericError);
    CHECK_THROWS_AS(gcml::fit_elasticnet_cd(prob.z, Eigen::VectorXd::Zero(20), {1.0, 0.1}),
                    gcml::DegenerateOutcome);
}
