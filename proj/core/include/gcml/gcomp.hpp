#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gcml/dataset.hpp"
#include "gcml/learners.hpp"

namespace gcml {

/// Marginal quantities from averaging counterfactual predictions.
struct MarginalEffect {
    double pi0 = 0.0;
    double pi1 = 0.0;
    double delta = 0.0;
    double log_mor = 0.0;
    Eigen::Index over_population = 0;
};

/// Predicts every in-scope individual's outcome under a=1 and a=0, averages
/// to pi1/pi0, and derives the difference and the marginal log odds ratio.
/// subset (when given) restricts the averaging population, which is how
/// bootstrap replicates evaluate on their out-of-bag rows. Throws
/// DegenerateMarginal when either average sits at 0 or 1.
MarginalEffect estimate_marginal(const OutcomeModel& model, const TrialDataset& data,
                                 const std::optional<std::vector<Eigen::Index>>& subset = std::nullopt);

} // namespace gcml
