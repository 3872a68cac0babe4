#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gcml/gcomp.hpp"
#include "gcml/learners.hpp"

namespace gcml {

struct ReplicateOutcome {
    bool ok = false;
    double log_mor = 0.0;
    double delta = 0.0;
};

struct BootstrapResult {
    MarginalEffect point;
    std::vector<ReplicateOutcome> replicates; // indexed by replicate, failed ones flagged
    double sd_logmor = 0.0;
    double sd_delta = 0.0;
    std::array<double, 2> ci_logmor{0.0, 0.0};
    std::array<double, 2> ci_delta{0.0, 0.0};
    int n_failed = 0;
    int b_requested = 0;
    int b_effective = 0;
};

/// Out-of-bag bootstrap with hyperparameters frozen at `params`. Replicate b
/// draws n indices with replacement from the stream (seed, "boot", b),
/// refits the learner on the sample (its design transform included), and
/// evaluates the marginal effect on the rows never drawn. Replicates with an
/// empty OOB set, a single-arm OOB set, or a degenerate fit or marginal are
/// excluded; more than 20% exclusions raises InferenceUnstable. SD uses
/// denominator B_effective - 1 and the CI is the percentile interval.
BootstrapResult bootstrap_effect(const TrialDataset& data, LearnerKind kind,
                                 const LearnerSettings& settings, const TunedParams& params,
                                 int b, std::uint64_t seed, const MarginalEffect& point,
                                 int workers = 1);

/// Type-7 quantile of the values (interpolated order statistic).
double quantile_type7(std::vector<double> values, double p);

} // namespace gcml
