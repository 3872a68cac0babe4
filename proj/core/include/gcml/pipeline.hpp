#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gcml/learners.hpp"
#include "gcml/metrics.hpp"
#include "gcml/simgen.hpp"

namespace gcml {

const char* library_version();

/// Settings for the batch commands, assembled from per-command defaults, an
/// optional JSON config file, and command-line overrides. `effect` is the
/// conditional odds ratio exp(beta_A) of the generating model; the marginal
/// odds ratio it induces comes out of truth calibration.
struct RunConfig {
    Scenario scenario = Scenario::simple;
    int n = 200;
    double effect = 3.0;
    int replicates = 500;
    int bootstrap = 500;
    std::vector<LearnerKind> learners{LearnerKind::unadjusted,  LearnerKind::lasso,
                                      LearnerKind::elasticnet,  LearnerKind::neuralnet,
                                      LearnerKind::svm_rbf,     LearnerKind::superlearner};
    LearnerSettings settings{};
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 1;
    std::string out_dir = "out";
    std::string dataset_path;
    std::string schema_path;
    std::int64_t auc_individuals = 1000000;
};

/// Overlays the keys present in the JSON config file onto `config`.
/// Unknown keys and malformed values raise DataError.
void apply_config_file(RunConfig& config, const std::string& path);

/// Rejects impossible settings (no learners, replicates < 1, a super
/// learner base that is itself the super learner, missing seed).
void validate_config(const RunConfig& config);

struct SimulateSummary {
    std::vector<ReplicateRecord> records;
    std::map<std::string, int> pipeline_failures;  // per method, replicates without a record
    std::map<std::string, int> bootstrap_failures; // per method, failed replicates summed over S
    std::int64_t dataset_resamples = 0;
    std::string records_path;
    std::string manifest_path;
};

/// Runs the full simulation study for one (scenario, n, effect) cell:
/// per replicate, draw a dataset, and for each learner tune on the full
/// replicate data, fit, take the G-computation point estimate, and attach
/// the out-of-bag bootstrap. Writes records.csv and manifest.json under
/// config.out_dir. Failed (replicate, method) pipelines are logged in the
/// manifest and the run continues.
SimulateSummary cmd_simulate(const RunConfig& config);

struct CalibrateSummary {
    TruthRecord truth;
    double theoretical_auc = 0.0;
    std::string truth_path;
};

/// Calibrates the true marginal values for the configured cell plus the
/// generating model's theoretical AUC, and writes truth.json.
CalibrateSummary cmd_calibrate(const RunConfig& config);

struct AnalyzeRow {
    std::string method;
    double log_mor = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double sd = 0.0;
    double auc = 0.5;
    double pi0 = 0.0;
    double pi1 = 0.0;
    double delta = 0.0;
    double delta_ci_lower = 0.0;
    double delta_ci_upper = 0.0;
    double sd_delta = 0.0;
    int b_failed = 0;
    bool warned = false;
};

struct AnalyzeSummary {
    std::vector<AnalyzeRow> rows;
    std::vector<std::string> failures;
    std::string forest_path;
    std::string manifest_path;
};

/// Applies every configured learner's pipeline to one user dataset
/// (config.dataset_path, optional sidecar schema) and writes a
/// forest-plot-ready forest.csv plus analysis.json with the tuned
/// hyperparameters. The dataset must be complete cases.
AnalyzeSummary cmd_analyze(const RunConfig& config);

struct ReportBlock {
    std::string scenario;
    int n = 0;
    double effect = 0.0;
    MetricsReport report;
};

struct ReportSummary {
    std::vector<ReportBlock> blocks;
    double true_mor = 0.0;
    std::string csv_path;
    std::string text_path;
    std::string text;
};

/// Joins simulation record files (each with its sibling manifest.json)
/// against a calibrated truth file for the same scenario and effect,
/// aggregates the evaluation criteria per method, and writes report.csv
/// plus a pretty-printed report.txt.
ReportSummary cmd_report(const std::vector<std::string>& records_files,
                         const std::string& truth_file, const std::string& out_dir);

} // namespace gcml
