// Microbenchmarks for the hot paths: basis expansion, the penalized path,
// AUC ranking, SMO, and one full bootstrap. Run with
//   build/benchmarks/gcml_bench --benchmark_min_time=0.5
// to get stable numbers on a quiet machine.

#include <benchmark/benchmark.h>

#include <cmath>

#include "gcml/bootstrap.hpp"
#include "gcml/design.hpp"
#include "gcml/elasticnet.hpp"
#include "gcml/gcomp.hpp"
#include "gcml/learners.hpp"
#include "gcml/logistic.hpp"
#include "gcml/rng.hpp"
#include "gcml/simgen.hpp"
#include "gcml/svm.hpp"
#include "gcml/tuning.hpp"

namespace {

gcml::TrialDataset simple_data(Eigen::Index n, std::uint64_t seed) {
    return gcml::generate_dataset({gcml::Scenario::simple, n, std::log(3.0), seed});
}

void BM_GenerateComplex(benchmark::State& state) {
    gcml::ScenarioSpec spec{gcml::Scenario::complex, state.range(0), std::log(3.0), 17};
    std::uint64_t replicate = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcml::generate_dataset(spec, replicate++));
    }
}
BENCHMARK(BM_GenerateComplex)->Arg(200);

void BM_BsplineBasis(benchmark::State& state) {
    gcml::RngStream rng(3, "bench");
    Eigen::VectorXd v(state.range(0));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcml::bspline_basis(v, 3, {-0.5, 0.0, 0.5}));
    }
}
BENCHMARK(BM_BsplineBasis)->Arg(200)->Arg(2000);

void BM_BuildDesign(benchmark::State& state) {
    gcml::TrialDataset data = simple_data(state.range(0), 5);
    gcml::DesignConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcml::build_design(data, config));
    }
}
BENCHMARK(BM_BuildDesign)->Arg(200);

void BM_LogisticIrls(benchmark::State& state) {
    gcml::TrialDataset data = simple_data(state.range(0), 7);
    gcml::DesignConfig config;
    config.use_splines = false;
    config.use_treatment_interactions = false;
    gcml::DesignMatrix design = gcml::build_design(data, config);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcml::fit_logistic_irls(design.z, data.y));
    }
}
BENCHMARK(BM_LogisticIrls)->Arg(200);

void BM_ElasticnetPath(benchmark::State& state) {
    gcml::TrialDataset data = simple_data(state.range(0), 11);
    gcml::DesignMatrix design = gcml::build_design(data, gcml::DesignConfig{});
    double lmax = gcml::elasticnet_lambda_max(design.z, data.y, 1.0);
    std::vector<double> grid = gcml::lambda_grid(lmax, 20, 1e-4);
    for (auto _ : state) {
        gcml::ElasticnetFit warm;
        bool first = true;
        for (double lambda : grid) {
            warm = gcml::fit_elasticnet_cd(design.z, data.y, {1.0, lambda},
                                           first ? nullptr : &warm);
            first = false;
        }
        benchmark::DoNotOptimize(warm);
    }
}
BENCHMARK(BM_ElasticnetPath)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ComputeAuc(benchmark::State& state) {
    gcml::RngStream rng(13, "bench");
    Eigen::VectorXd scores(state.range(0)), labels(state.range(0));
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        scores[i] = rng.normal();
        labels[i] = rng.uniform01() < 0.35 ? 1.0 : 0.0;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcml::compute_auc(scores, labels));
    }
}
BENCHMARK(BM_ComputeAuc)->Arg(200)->Arg(5000);

void BM_SvmSmo(benchmark::State& state) {
    gcml::TrialDataset data = simple_data(state.range(0), 19);
    gcml::DesignConfig config;
    config.use_splines = false;
    config.use_treatment_interactions = false;
    gcml::DesignMatrix design = gcml::build_design(data, config);
    double gamma = gcml::median_pairwise_gamma(design.z);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcml::fit_svm_rbf(design.z, data.y, 1.0, gamma));
    }
}
BENCHMARK(BM_SvmSmo)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_BootstrapLogistic(benchmark::State& state) {
    gcml::TrialDataset data = simple_data(100, 23);
    gcml::LearnerSettings settings;
    auto model =
        gcml::fit_model(data, gcml::LearnerKind::logistic, settings, gcml::TunedParams{}, 1);
    gcml::MarginalEffect point = gcml::estimate_marginal(*model, data);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcml::bootstrap_effect(data, gcml::LearnerKind::logistic,
                                                        settings, gcml::TunedParams{},
                                                        static_cast<int>(state.range(0)), 31,
                                                        point, 1));
    }
}
BENCHMARK(BM_BootstrapLogistic)->Arg(20)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
