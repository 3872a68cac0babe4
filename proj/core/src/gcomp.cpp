#include "gcml/gcomp.hpp"

#include <cmath>

#include "gcml/errors.hpp"

namespace gcml {

MarginalEffect estimate_marginal(const OutcomeModel& model, const TrialDataset& data,
                                 const std::optional<std::vector<Eigen::Index>>& subset) {
    std::vector<Eigen::Index> scope;
    if (subset) {
        if (subset->empty()) throw DataError("estimate_marginal: empty subset");
        scope = *subset;
    } else {
        scope.resize(static_cast<std::size_t>(data.n()));
        for (Eigen::Index i = 0; i < data.n(); ++i) scope[static_cast<std::size_t>(i)] = i;
    }

    double sum0 = 0.0, sum1 = 0.0;
    for (Eigen::Index i : scope) {
        Eigen::VectorXd x = data.x.row(i);
        sum1 += model.predict_proba(1.0, x);
        sum0 += model.predict_proba(0.0, x);
    }
    const double m = static_cast<double>(scope.size());

    MarginalEffect effect;
    effect.pi0 = sum0 / m;
    effect.pi1 = sum1 / m;
    effect.delta = effect.pi1 - effect.pi0;
    effect.over_population = static_cast<Eigen::Index>(scope.size());
    if (effect.pi0 <= 1e-12 || effect.pi0 >= 1.0 - 1e-12 || effect.pi1 <= 1e-12 ||
        effect.pi1 >= 1.0 - 1e-12)
        throw DegenerateMarginal("marginal proportion at 0 or 1; log mOR undefined");
    effect.log_mor = std::log(effect.pi1 / (1.0 - effect.pi1)) -
                     std::log(effect.pi0 / (1.0 - effect.pi0));
    return effect;
}

} // namespace gcml
