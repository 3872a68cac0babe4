#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gcml/learners.hpp"

namespace gcml {

struct FoldPlan {
    std::vector<int> fold_of; // per row, in [0, k)
    int k = 0;
    bool low_events = false; // fewer events than folds: some folds have none
};

/// Outcome-stratified fold assignment: indices are shuffled within each
/// stratum and dealt round-robin with a single rotating pointer, so both the
/// total fold sizes and the per-fold event counts differ by at most 1.
FoldPlan make_folds(Eigen::Index n, int k, const Eigen::VectorXd& y, std::uint64_t seed);

/// Concordance AUC by rank-sum with tie averaging. Throws NumericError when
/// labels are single-class.
double compute_auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

struct GridPoint {
    TunedParams params;
    double mean_auc = 0.5;
};

struct TuneResult {
    TunedParams params;
    double cv_auc = 0.5;
    int n_fold_failures = 0;
    std::vector<GridPoint> table;
    std::vector<std::string> warnings;
};

/// Selects hyperparameters for the learner by mean-over-folds CV AUC over
/// the learner's grid, with ties broken toward the more regularized
/// candidate and then the lowest grid index. For the super learner this
/// tunes every base, builds the out-of-fold prediction matrix, and fixes the
/// simplex weights.
TuneResult tune_learner(const TrialDataset& data, LearnerKind kind,
                        const LearnerSettings& settings, std::uint64_t seed);

/// Super-learner tuning that reuses already-tuned base hyperparameters
/// (aligned with settings.sl_bases) instead of re-running each base's grid
/// search; the out-of-fold matrix and weight fit are unchanged.
TuneResult tune_super_learner_with(const TrialDataset& data, const LearnerSettings& settings,
                                   std::uint64_t seed, const std::vector<TunedParams>& base_params);

} // namespace gcml
