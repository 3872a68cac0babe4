#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gcml/design.hpp"

namespace gcml {

enum class LearnerKind { unadjusted, logistic, lasso, elasticnet, neuralnet, svm_rbf, superlearner };

std::string to_string(LearnerKind kind);
std::optional<LearnerKind> learner_kind_from_string(const std::string& name);

/// Hyperparameters selected by tuning and then held fixed, including during
/// every bootstrap replicate. Only the fields relevant to the learner kind
/// are meaningful; the super learner carries its bases recursively plus the
/// fixed ensemble weights.
struct TunedParams {
    double lambda = 0.0;
    double alpha = 1.0;
    int hidden_size = 1;
    double decay = 0.01;
    double cost = 1.0;
    double gamma = 1.0;
    std::vector<LearnerKind> sl_kinds;
    std::vector<TunedParams> sl_params;
    Eigen::VectorXd sl_weights;
};

std::string tuned_params_to_json(LearnerKind kind, const TunedParams& params);

/// Shared knobs for design construction and tuning grids.
struct LearnerSettings {
    DesignConfig penalized_design{};                                   // splines + interactions
    DesignConfig smooth_design{false, 3, 3, false, true, false};       // plain standardized
    int cv_folds = 20;
    int grid_length = 20;
    double lambda_min_ratio = 1e-4;
    double nn_decay = 0.01;
    int enet_max_sweeps = 100000;
    std::vector<LearnerKind> sl_bases{LearnerKind::lasso, LearnerKind::elasticnet,
                                      LearnerKind::neuralnet, LearnerKind::svm_rbf};
};

/// Design used when fitting the given learner on a dataset.
DesignConfig design_for(LearnerKind kind, const LearnerSettings& settings);

/// A fitted outcome model Q(Y | A, X). Prediction runs the frozen design
/// transform with the arm forced, then the learner head, clipped away from 0
/// and 1.
class OutcomeModel {
public:
    virtual ~OutcomeModel() = default;
    virtual LearnerKind kind() const = 0;
    virtual std::string payload_json() const = 0;

    double predict_proba(double a_forced, const Eigen::VectorXd& x_row) const;
    bool warned() const { return warned_; }

protected:
    virtual double raw_predict(double a_forced, const Eigen::VectorXd& x_row) const = 0;
    bool warned_ = false;
};

/// Builds the learner's design on `data` and fits with the given fixed
/// hyperparameters. Seeded sub-draws (neural net init, super learner bases)
/// derive deterministically from `seed`.
std::unique_ptr<OutcomeModel> fit_model(const TrialDataset& data, LearnerKind kind,
                                        const LearnerSettings& settings, const TunedParams& params,
                                        std::uint64_t seed);

} // namespace gcml
