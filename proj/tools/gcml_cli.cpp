#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gcml/csv.hpp"
#include "gcml/errors.hpp"
#include "gcml/pipeline.hpp"

namespace {

/// Raw flag values plus presence markers, merged onto the per-command
/// default config after the config file so flags always win.
struct Overrides {
    std::string config_file;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out;
    int n = 0;
    std::string scenario;
    double effect = 0.0;
    int reps = 0;
    int bootstrap = 0;
    std::vector<std::string> learners;
    std::string dataset;
    std::string schema;

    CLI::Option* o_seed = nullptr;
    CLI::Option* o_workers = nullptr;
    CLI::Option* o_out = nullptr;
    CLI::Option* o_n = nullptr;
    CLI::Option* o_scenario = nullptr;
    CLI::Option* o_effect = nullptr;
    CLI::Option* o_reps = nullptr;
    CLI::Option* o_bootstrap = nullptr;
    CLI::Option* o_learners = nullptr;
    CLI::Option* o_dataset = nullptr;
    CLI::Option* o_schema = nullptr;
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--config", ov.config_file, "JSON config file; flags override its keys")
        ->check(CLI::ExistingFile);
    ov.o_seed = cmd->add_option("--seed", ov.seed, "Master seed (required, never clock-seeded)");
    ov.o_workers = cmd->add_option("--workers", ov.workers, "Worker threads")
                       ->check(CLI::PositiveNumber);
    ov.o_out = cmd->add_option("--out", ov.out, "Output directory");
}

void add_cell_flags(CLI::App* cmd, Overrides& ov) {
    ov.o_n = cmd->add_option("--n", ov.n, "Trial size per dataset")->check(CLI::PositiveNumber);
    ov.o_scenario =
        cmd->add_option("--scenario", ov.scenario, "complex, simple, or simple_reduced");
    ov.o_effect = cmd->add_option(
        "--effect", ov.effect,
        "Treatment effect as the conditional odds ratio exp(beta_A); typical cells "
        "use 3, 1.5, 1 (and 0.9729 for the complex null)");
    ov.o_reps = cmd->add_option("--reps", ov.reps, "Replicate count")->check(CLI::PositiveNumber);
}

void add_learner_flags(CLI::App* cmd, Overrides& ov) {
    ov.o_bootstrap = cmd->add_option("--bootstrap", ov.bootstrap, "Bootstrap samples per fit")
                         ->check(CLI::PositiveNumber);
    ov.o_learners = cmd->add_option("--learners", ov.learners,
                                    "Comma-separated learner list (unadjusted, logistic, lasso, "
                                    "elasticnet, neuralnet, svm, superlearner)")
                        ->delimiter(',');
}

/// Builds the final config: per-command defaults, then the config file,
/// then the flags the user actually passed. Throws DataError on bad values.
gcml::RunConfig merge_config(gcml::RunConfig config, const Overrides& ov) {
    if (!ov.config_file.empty()) gcml::apply_config_file(config, ov.config_file);
    if (ov.o_seed && *ov.o_seed) {
        config.seed = ov.seed;
        config.seed_set = true;
    }
    if (ov.o_workers && *ov.o_workers) config.workers = ov.workers;
    if (ov.o_out && *ov.o_out) config.out_dir = ov.out;
    if (ov.o_n && *ov.o_n) config.n = ov.n;
    if (ov.o_scenario && *ov.o_scenario) {
        auto s = gcml::scenario_from_string(ov.scenario);
        if (!s) throw gcml::DataError("unknown scenario \"" + ov.scenario + "\"");
        config.scenario = *s;
    }
    if (ov.o_effect && *ov.o_effect) config.effect = ov.effect;
    if (ov.o_reps && *ov.o_reps) config.replicates = ov.reps;
    if (ov.o_bootstrap && *ov.o_bootstrap) config.bootstrap = ov.bootstrap;
    if (ov.o_learners && *ov.o_learners) {
        std::vector<gcml::LearnerKind> kinds;
        for (const auto& name : ov.learners) {
            auto kind = gcml::learner_kind_from_string(name);
            if (!kind) throw gcml::DataError("unknown learner \"" + name + "\"");
            kinds.push_back(*kind);
        }
        config.learners = std::move(kinds);
    }
    if (ov.o_dataset && *ov.o_dataset) config.dataset_path = ov.dataset;
    if (ov.o_schema && *ov.o_schema) config.schema_path = ov.schema;
    return config;
}

int run_simulate(const Overrides& ov) {
    gcml::RunConfig defaults;
    defaults.replicates = 500;
    defaults.bootstrap = 500;
    gcml::RunConfig config = merge_config(defaults, ov);
    if (!config.seed_set) {
        std::cerr << "usage error: --seed (or the config \"seed\" key) is required\n";
        return 1;
    }
    gcml::SimulateSummary summary = gcml::cmd_simulate(config);
    std::cout << "wrote " << summary.records.size() << " records over " << config.replicates
              << " replicates to " << summary.records_path << "\n";
    for (const auto& [method, count] : summary.pipeline_failures)
        if (count > 0) std::cout << "  " << method << ": " << count << " failed replicates\n";
    return 0;
}

int run_calibrate(const Overrides& ov) {
    gcml::RunConfig defaults;
    defaults.replicates = 200000;
    gcml::RunConfig config = merge_config(defaults, ov);
    if (!config.seed_set) {
        std::cerr << "usage error: --seed (or the config \"seed\" key) is required\n";
        return 1;
    }
    gcml::CalibrateSummary summary = gcml::cmd_calibrate(config);
    const gcml::TruthRecord& t = summary.truth;
    std::cout << "scenario " << gcml::to_string(config.scenario) << ", conditional OR "
              << gcml::format_double(config.effect) << ", n " << config.n << ", "
              << config.replicates << " replicates\n"
              << "  pi0 " << gcml::format_double(t.pi0) << "\n"
              << "  pi1 " << gcml::format_double(t.pi1) << "\n"
              << "  delta " << gcml::format_double(t.delta) << "\n"
              << "  log mOR " << gcml::format_double(t.log_mor) << " (mOR "
              << gcml::format_double(std::exp(t.log_mor)) << ", mc se "
              << gcml::format_double(t.mc_se) << ")\n"
              << "  theoretical AUC " << gcml::format_double(summary.theoretical_auc) << "\n"
              << "wrote " << summary.truth_path << "\n";
    return 0;
}

int run_analyze(const Overrides& ov) {
    gcml::RunConfig defaults;
    defaults.bootstrap = 1000;
    gcml::RunConfig config = merge_config(defaults, ov);
    if (!config.seed_set) {
        std::cerr << "usage error: --seed (or the config \"seed\" key) is required\n";
        return 1;
    }
    gcml::AnalyzeSummary summary = gcml::cmd_analyze(config);
    std::cout << "method        log mOR      95% CI                sd        cv AUC\n";
    for (const auto& row : summary.rows) {
        std::cout << row.method;
        for (std::size_t i = row.method.size(); i < 14; ++i) std::cout << ' ';
        std::cout << gcml::format_double(row.log_mor) << "  [" << gcml::format_double(row.ci_lower)
                  << ", " << gcml::format_double(row.ci_upper) << "]  "
                  << gcml::format_double(row.sd) << "  " << gcml::format_double(row.auc) << "\n";
    }
    for (const auto& message : summary.failures) std::cout << "failed: " << message << "\n";
    std::cout << "wrote " << summary.forest_path << "\n";
    return 0;
}

int run_report(const std::vector<std::string>& records, const std::string& truth,
               const std::string& out) {
    gcml::ReportSummary summary = gcml::cmd_report(records, truth, out);
    std::cout << summary.text;
    std::cout << "wrote " << summary.csv_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"G-computation estimation of marginal treatment effects in randomized trials"};
    app.require_subcommand(1);

    Overrides sim_ov, cal_ov, ana_ov;

    CLI::App* sim = app.add_subcommand(
        "simulate", "Run a simulation study cell and write per-replicate records");
    add_common_flags(sim, sim_ov);
    add_cell_flags(sim, sim_ov);
    add_learner_flags(sim, sim_ov);

    CLI::App* cal = app.add_subcommand(
        "calibrate", "Calibrate the true marginal values and theoretical AUC for a cell");
    add_common_flags(cal, cal_ov);
    add_cell_flags(cal, cal_ov);

    CLI::App* ana =
        app.add_subcommand("analyze", "Estimate the marginal effect on one trial dataset");
    add_common_flags(ana, ana_ov);
    add_learner_flags(ana, ana_ov);
    ana_ov.o_dataset = ana->add_option("dataset", ana_ov.dataset,
                                       "Trial CSV with y, a, and covariate columns");
    ana_ov.o_schema = ana->add_option(
        "--schema", ana_ov.schema, "JSON sidecar mapping columns to binary/continuous");

    std::vector<std::string> report_records;
    std::string report_truth;
    std::string report_out = "out";
    CLI::App* rep = app.add_subcommand(
        "report", "Aggregate simulation records against a calibrated truth");
    rep->add_option("records", report_records, "records.csv files (manifest.json beside each)")
        ->required()
        ->check(CLI::ExistingFile);
    rep->add_option("--truth", report_truth, "truth.json from calibrate")
        ->required()
        ->check(CLI::ExistingFile);
    rep->add_option("--out", report_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return run_simulate(sim_ov);
        if (cal->parsed()) return run_calibrate(cal_ov);
        if (ana->parsed()) return run_analyze(ana_ov);
        if (rep->parsed()) return run_report(report_records, report_truth, report_out);
    } catch (const gcml::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const gcml::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
