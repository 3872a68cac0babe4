#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "gcml/design.hpp"
#include "gcml/elasticnet.hpp"
#include "gcml/errors.hpp"
#include "gcml/logistic.hpp"
#include "gcml/rng.hpp"
#include "gcml/simgen.hpp"
#include "gcml/tuning.hpp"

namespace {

// O(n^2) concordance with ties counted half, straight from the definition.
double ref_auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
    double concordant = 0.0;
    long pairs = 0;
    for (Eigen::Index i = 0; i < scores.size(); ++i)
        for (Eigen::Index j = 0; j < scores.size(); ++j) {
            if (labels[i] != 1.0 || labels[j] != 0.0) continue;
            ++pairs;
            if (scores[i] > scores[j])
                concordant += 1.0;
            else if (scores[i] == scores[j])
                concordant += 0.5;
        }
    return concordant / static_cast<double>(pairs);
}

gcml::TrialDataset make_data(Eigen::Index n, std::uint64_t seed) {
    gcml::ScenarioSpec spec;
    spec.scenario = gcml::Scenario::simple;
    spec.n = n;
    spec.effect = std::log(2.0);
    spec.seed = seed;
    return gcml::generate_dataset(spec, 0);
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& z, const std::vector<Eigen::Index>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), z.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = z.row(idx[i]);
    return out;
}

Eigen::VectorXd take_elems(const Eigen::VectorXd& y, const std::vector<Eigen::Index>& idx) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = y[idx[i]];
    return out;
}

} // namespace

TEST_CASE("compute_auc equals the pairwise oracle") {
    gcml::RngStream rng(81);
    const Eigen::Index n = 150;
    Eigen::VectorXd scores(n), labels(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // Coarse rounding forces plenty of exact ties.
        scores[i] = std::round(rng.uniform01() * 10.0) / 10.0;
        labels[i] = rng.bernoulli(0.4) ? 1.0 : 0.0;
    }
    CHECK(gcml::compute_auc(scores, labels) == doctest::Approx(ref_auc(scores, labels)).epsilon(1e-12));

    // Perfect orderings hit the endpoints exactly.
    Eigen::VectorXd s(6), l(6);
    s << 1, 2, 3, 4, 5, 6;
    l << 0, 0, 0, 1, 1, 1;
    CHECK(gcml::compute_auc(s, l) == 1.0);
    l.reverseInPlace();
    CHECK(gcml::compute_auc(s, l) == 0.0);

    CHECK_THROWS_AS(gcml::compute_auc(s, Eigen::VectorXd::Ones(6)), gcml::NumericError);
}

TEST_CASE("fold plan balances sizes and events") {
    gcml::RngStream rng(82);
    const Eigen::Index n = 103;
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.bernoulli(0.3) ? 1.0 : 0.0;
    const int k = 10;
    gcml::FoldPlan plan = gcml::make_folds(n, k, y, 991);
    REQUIRE(plan.k == k);
    REQUIRE(plan.fold_of.size() == static_cast<std::size_t>(n));

    std::vector<int> size(k, 0), events(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        int f = plan.fold_of[static_cast<std::size_t>(i)];
        REQUIRE(f >= 0);
        REQUIRE(f < k);
        ++size[static_cast<std::size_t>(f)];
        if (y[i] == 1.0) ++events[static_cast<std::size_t>(f)];
    }
    auto [smin, smax] = std::minmax_element(size.begin(), size.end());
    auto [emin, emax] = std::minmax_element(events.begin(), events.end());
    CHECK(*smax - *smin <= 1);
    CHECK(*emax - *emin <= 1);

    gcml::FoldPlan again = gcml::make_folds(n, k, y, 991);
    CHECK(plan.fold_of == again.fold_of);
    gcml::FoldPlan other = gcml::make_folds(n, k, y, 992);
    CHECK(plan.fold_of != other.fold_of);

    CHECK_THROWS_AS(gcml::make_folds(5, 6, y.head(5), 1), gcml::NumericError);
    CHECK_THROWS_AS(gcml::make_folds(5, 1, y.head(5), 1), gcml::NumericError);

    Eigen::VectorXd sparse = Eigen::VectorXd::Zero(20);
    sparse[3] = 1.0;
    CHECK(gcml::make_folds(20, 5, sparse, 1).low_events);
}

TEST_CASE("lasso tuning reproduces a hand-rolled two-candidate cross-validation") {
    gcml::TrialDataset data = make_data(40, 83);
    gcml::LearnerSettings settings;
    settings.cv_folds = 5;
    settings.grid_length = 2;
    const std::uint64_t seed = 2718;

    gcml::TuneResult got = gcml::tune_learner(data, gcml::LearnerKind::lasso, settings, seed);

    // Replicate: same folds, same frozen design, warm path over the two
    // lambdas, fold-averaged AUC, argmax with ties to the larger lambda.
    gcml::DesignMatrix design =
        gcml::build_design(data, gcml::design_for(gcml::LearnerKind::lasso, settings));
    gcml::FoldPlan plan =
        gcml::make_folds(data.n(), settings.cv_folds, data.y, gcml::derive_seed(seed, "folds"));
    double lmax = gcml::elasticnet_lambda_max(design.z, data.y, 1.0);
    std::vector<double> lambdas =
        gcml::lambda_grid(lmax, settings.grid_length, settings.lambda_min_ratio);

    std::vector<double> auc_sum(lambdas.size(), 0.0);
    for (int f = 0; f < plan.k; ++f) {
        std::vector<Eigen::Index> tr, te;
        for (Eigen::Index i = 0; i < data.n(); ++i)
            (plan.fold_of[static_cast<std::size_t>(i)] == f ? te : tr).push_back(i);
        Eigen::MatrixXd ztr = take_rows(design.z, tr);
        Eigen::VectorXd ytr = take_elems(data.y, tr);
        Eigen::MatrixXd zte = take_rows(design.z, te);
        Eigen::VectorXd yte = take_elems(data.y, te);
        gcml::ElasticnetFit warm;
        bool have = false;
        for (std::size_t li = 0; li < lambdas.size(); ++li) {
            gcml::ElasticnetFit fit = gcml::fit_elasticnet_cd(
                ztr, ytr, {1.0, lambdas[li]}, have ? &warm : nullptr, 1e-7, settings.enet_max_sweeps);
            Eigen::VectorXd scores(zte.rows());
            for (Eigen::Index i = 0; i < zte.rows(); ++i)
                scores[i] = gcml::sigmoid(fit.b0 + fit.beta.dot(zte.row(i)));
            double auc = 0.5;
            try {
                auc = gcml::compute_auc(scores, yte);
            } catch (const gcml::Error&) {
            }
            auc_sum[li] += auc;
            warm = std::move(fit);
            have = true;
        }
    }
    std::size_t best = 0;
    double best_auc = -1.0;
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        double mean = auc_sum[li] / plan.k;
        if (mean > best_auc || (mean == best_auc && lambdas[li] > lambdas[best])) {
            best_auc = mean;
            best = li;
        }
    }
    CHECK(got.params.lambda == doctest::Approx(lambdas[best]).epsilon(1e-14));
    CHECK(got.params.alpha == 1.0);
    CHECK(got.cv_auc == doctest::Approx(best_auc).epsilon(1e-12));
    REQUIRE(got.table.size() == lambdas.size());
}

TEST_CASE("all-tied candidates pick the most regularized and count failures") {
    // Six rows mean six singleton folds, so every held-out AUC is the 0.5
    // fallback and every (candidate, fold) pair is a failure.
    gcml::RngStream rng(84);
    gcml::TrialDataset data;
    const Eigen::Index n = 6;
    data.y.resize(n);
    data.a.resize(n);
    data.x.resize(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        data.y[i] = i < 3 ? 1.0 : 0.0;
        data.a[i] = i % 2 == 0 ? 1.0 : 0.0;
        data.x(i, 0) = rng.normal();
    }
    data.column_kinds = {gcml::ColumnKind::continuous};
    data.column_names = {"x1"};

    gcml::LearnerSettings settings;
    settings.grid_length = 2;
    gcml::TuneResult res = gcml::tune_learner(data, gcml::LearnerKind::lasso, settings, 17);
    CHECK(res.cv_auc == 0.5);
    CHECK(res.n_fold_failures == 12);
    REQUIRE(res.table.size() == 2);
    double lmax = std::max(res.table[0].params.lambda, res.table[1].params.lambda);
    CHECK(res.params.lambda == lmax);
}

TEST_CASE("trivial learners report an honest cross-validated auc") {
    gcml::TrialDataset data = make_data(60, 85);
    gcml::LearnerSettings settings;
    settings.cv_folds = 4;
    for (auto kind : {gcml::LearnerKind::unadjusted, gcml::LearnerKind::logistic}) {
        gcml::TuneResult res = gcml::tune_learner(data, kind, settings, 5);
        CHECK(res.cv_auc >= 0.0);
        CHECK(res.cv_auc <= 1.0);
        REQUIRE(res.table.size() == 1);
    }
}

TEST_CASE("grid learners search their documented grids") {
    gcml::TrialDataset data = make_data(40, 86);
    gcml::LearnerSettings settings;
    settings.cv_folds = 3;
    settings.grid_length = 3;

    gcml::TuneResult nn = gcml::tune_learner(data, gcml::LearnerKind::neuralnet, settings, 6);
    CHECK(nn.params.hidden_size >= 1);
    CHECK(nn.params.hidden_size <= 3);
    CHECK(nn.params.decay == settings.nn_decay);
    REQUIRE(nn.table.size() == 3);

    gcml::TuneResult svm = gcml::tune_learner(data, gcml::LearnerKind::svm_rbf, settings, 7);
    REQUIRE(svm.table.size() == 3);
    // Costs walk the powers of two from 2^-5.
    CHECK(svm.table[0].params.cost == doctest::Approx(std::pow(2.0, -5)).epsilon(1e-14));
    CHECK(svm.table[1].params.cost == doctest::Approx(std::pow(2.0, -4)).epsilon(1e-14));
    CHECK(svm.table[2].params.cost == doctest::Approx(std::pow(2.0, -3)).epsilon(1e-14));
    CHECK(svm.params.gamma == svm.table[0].params.gamma);
}

TEST_CASE("super learner tuning with pre-tuned bases is consistent") {
    gcml::TrialDataset data = make_data(50, 87);
    gcml::LearnerSettings settings;
    settings.cv_folds = 3;
    settings.grid_length = 2;
    settings.sl_bases = {gcml::LearnerKind::lasso, gcml::LearnerKind::elasticnet};

    std::vector<gcml::TunedParams> base_params(2);
    for (std::size_t k = 0; k < 2; ++k)
        base_params[k] = gcml::tune_learner(data, settings.sl_bases[k], settings, 77).params;

    gcml::TuneResult sl = gcml::tune_super_learner_with(data, settings, 77, base_params);
    REQUIRE(sl.params.sl_kinds.size() == 2);
    REQUIRE(sl.params.sl_params.size() == 2);
    REQUIRE(sl.params.sl_weights.size() == 2);
    CHECK(sl.params.sl_weights.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sl.params.sl_weights.minCoeff() >= 0.0);
    CHECK(sl.params.sl_params[0].lambda == base_params[0].lambda);
    CHECK(sl.params.sl_params[1].lambda == base_params[1].lambda);

    gcml::TuneResult again = gcml::tune_super_learner_with(data, settings, 77, base_params);
    CHECK((sl.params.sl_weights - again.params.sl_weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sl.cv_auc == again.cv_auc);
}
