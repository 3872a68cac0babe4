#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gcml/dataset.hpp"

namespace gcml {

enum class Scenario { complex, simple, simple_reduced };

std::string to_string(Scenario scenario);
std::optional<Scenario> scenario_from_string(const std::string& name);

/// effect is the treatment coefficient on the logit scale: beta4 for the
/// complex scenario, beta2 for the simple ones.
struct ScenarioSpec {
    Scenario scenario = Scenario::simple;
    Eigen::Index n = 200;
    double effect = 0.0;
    std::uint64_t seed = 0;
};

/// Draws one dataset from the scenario's generating process. Rows are
/// generated individually: the covariates in table order (one standard
/// normal consumed per covariate, thresholded ones included), then the arm,
/// then the outcome (one uniform). replicate/attempt select the derived
/// stream (seed, "sim", replicate, attempt); eta_out, when given, receives
/// each row's true linear predictor.
TrialDataset generate_dataset(const ScenarioSpec& spec, std::uint64_t replicate = 0,
                              std::uint64_t attempt = 0, Eigen::VectorXd* eta_out = nullptr);

TrialDataset generate_complex(Eigen::Index n, double beta4, std::uint64_t seed);
TrialDataset generate_simple(Eigen::Index n, double beta2, bool reduced, std::uint64_t seed);

struct TruthRecord {
    double pi0 = 0.0;
    double pi1 = 0.0;
    double delta = 0.0;
    double log_mor = 0.0;
    std::int64_t n_reps = 0;
    double mc_se = 0.0;       // sd of replicate log OR estimates / sqrt(n_reps)
    std::int64_t n_resampled = 0;
};

/// True marginal values by averaging the raw arm-wise estimates over n_reps
/// freshly simulated datasets of size spec.n. Degenerate replicates (an
/// empty arm or a 0/1 proportion) are redrawn from the next attempt stream.
TruthRecord calibrate_truth(const ScenarioSpec& spec, std::int64_t n_reps, int workers = 1);

/// True when an arm is empty or an arm's event proportion is 0 or 1, the
/// same exclusion rule truth calibration applies; the simulation harness
/// redraws such datasets so the sampled population matches the calibrated
/// truth.
bool dataset_degenerate(const TrialDataset& data);

/// Concordance between the true linear predictor and the simulated outcome
/// over n_individuals draws: the outcome model's theoretical AUC.
double theoretical_auc(const ScenarioSpec& spec, std::int64_t n_individuals = 1000000);

} // namespace gcml
