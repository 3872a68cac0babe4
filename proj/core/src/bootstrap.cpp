#include "gcml/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "gcml/errors.hpp"
#include "gcml/parallel.hpp"
#include "gcml/rng.hpp"

namespace gcml {

double quantile_type7(std::vector<double> values, double p) {
    if (values.empty()) throw NumericError("quantile of empty set");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    double h = p * static_cast<double>(values.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

namespace {

double sample_sd(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

BootstrapResult bootstrap_effect(const TrialDataset& data, LearnerKind kind,
                                 const LearnerSettings& settings, const TunedParams& params,
                                 int b, std::uint64_t seed, const MarginalEffect& point,
                                 int workers) {
    if (b < 2) throw NumericError("bootstrap needs B >= 2");
    const Eigen::Index n = data.n();

    BootstrapResult result;
    result.point = point;
    result.b_requested = b;
    result.replicates.assign(static_cast<std::size_t>(b), ReplicateOutcome{});

    parallel_for(static_cast<std::size_t>(b), workers, [&](std::size_t rb) {
        RngStream rng(seed, "boot", rb);
        std::vector<Eigen::Index> sample_rows(static_cast<std::size_t>(n));
        std::vector<bool> drawn(static_cast<std::size_t>(n), false);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto j = static_cast<Eigen::Index>(rng.uniform_below(static_cast<std::uint64_t>(n)));
            sample_rows[static_cast<std::size_t>(i)] = j;
            drawn[static_cast<std::size_t>(j)] = true;
        }
        std::vector<Eigen::Index> oob;
        for (Eigen::Index i = 0; i < n; ++i)
            if (!drawn[static_cast<std::size_t>(i)]) oob.push_back(i);
        if (oob.empty()) return;
        bool arm0 = false, arm1 = false;
        for (Eigen::Index i : oob) (data.a[i] == 1.0 ? arm1 : arm0) = true;
        if (!arm0 || !arm1) return;

        TrialDataset boot;
        boot.column_kinds = data.column_kinds;
        boot.column_names = data.column_names;
        boot.y.resize(n);
        boot.a.resize(n);
        boot.x.resize(n, data.p());
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index src = sample_rows[static_cast<std::size_t>(i)];
            boot.y[i] = data.y[src];
            boot.a[i] = data.a[src];
            boot.x.row(i) = data.x.row(src);
        }

        try {
            auto model = fit_model(boot, kind, settings, params, derive_seed(seed, "bootfit", rb));
            MarginalEffect eff = estimate_marginal(*model, data, oob);
            result.replicates[rb] = {true, eff.log_mor, eff.delta};
        } catch (const Error&) {
            // fit or marginal degenerate on this resample; leave it failed
        }
    });

    std::vector<double> log_mors, deltas;
    for (const auto& rep : result.replicates) {
        if (!rep.ok) continue;
        log_mors.push_back(rep.log_mor);
        deltas.push_back(rep.delta);
    }
    result.n_failed = b - static_cast<int>(log_mors.size());
    result.b_effective = static_cast<int>(log_mors.size());
    if (5 * result.n_failed > b)
        throw InferenceUnstable("more than 20% of bootstrap replicates failed (" +
                                std::to_string(result.n_failed) + " of " + std::to_string(b) + ")");

    result.sd_logmor = sample_sd(log_mors);
    result.sd_delta = sample_sd(deltas);
    result.ci_logmor = {quantile_type7(log_mors, 0.025), quantile_type7(log_mors, 0.975)};
    result.ci_delta = {quantile_type7(deltas, 0.025), quantile_type7(deltas, 0.975)};
    return result;
}

} // namespace gcml
