#include "gcml/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <nlohmann/json.hpp>

#include "gcml/bootstrap.hpp"
#include "gcml/csv.hpp"
#include "gcml/errors.hpp"
#include "gcml/gcomp.hpp"
#include "gcml/parallel.hpp"
#include "gcml/rng.hpp"
#include "gcml/tuning.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gcml {

const char* library_version() { return "0.1.0"; }

namespace {

const std::vector<std::string> kRecordColumns = {
    "replicate", "method",       "pi0_hat",  "pi1_hat",        "delta_hat",
    "theta_hat", "sd_hat",       "ci_lower", "ci_upper",       "sd_delta",
    "ci_delta_lower", "ci_delta_upper", "b_failed", "warned"};

fs::path ensure_out_dir(const std::string& dir) {
    fs::path path(dir.empty() ? std::string(".") : dir);
    std::error_code ec;
    fs::create_directories(path, ec);
    if (!fs::is_directory(path))
        throw DataError("cannot create output directory " + path.string() +
                        (ec ? ": " + ec.message() : ""));
    return path;
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

std::vector<std::string> learner_names(const std::vector<LearnerKind>& kinds) {
    std::vector<std::string> names;
    names.reserve(kinds.size());
    for (LearnerKind kind : kinds) names.push_back(to_string(kind));
    return names;
}

json base_echo(const RunConfig& config, const std::string& command) {
    json j;
    j["command"] = command;
    j["version"] = library_version();
    j["seed"] = config.seed;
    return j;
}

json cell_echo(const RunConfig& config) {
    json j;
    j["scenario"] = to_string(config.scenario);
    j["n"] = config.n;
    j["effect"] = config.effect;
    j["effect_coefficient"] = std::log(config.effect);
    return j;
}

json learner_echo(const RunConfig& config) {
    const LearnerSettings& s = config.settings;
    json j;
    j["learners"] = learner_names(config.learners);
    j["bootstrap"] = config.bootstrap;
    j["folds"] = s.cv_folds;
    j["grid_length"] = s.grid_length;
    j["lambda_min_ratio"] = s.lambda_min_ratio;
    j["nn_decay"] = s.nn_decay;
    j["design"] = {{"splines", s.penalized_design.use_splines},
                   {"interactions", s.penalized_design.use_treatment_interactions},
                   {"spline_degree", s.penalized_design.spline_degree},
                   {"knots", s.penalized_design.n_interior_knots}};
    j["sl_bases"] = learner_names(s.sl_bases);
    return j;
}

/// Tunes the learner on the replicate data, caching per kind so the super
/// learner reuses base tuning already done for standalone methods (and vice
/// versa). Seeds depend only on (master, replicate, kind), never on the
/// order learners are listed.
const TuneResult& tune_for(LearnerKind kind, const TrialDataset& data, const RunConfig& config,
                           std::uint64_t replicate, std::map<int, TuneResult>& cache) {
    const int id = static_cast<int>(kind);
    auto it = cache.find(id);
    if (it != cache.end()) return it->second;
    const std::uint64_t seed =
        derive_seed(config.seed, "tune", replicate, static_cast<std::uint64_t>(id));
    TuneResult result;
    if (kind == LearnerKind::superlearner) {
        std::vector<TunedParams> base_params;
        base_params.reserve(config.settings.sl_bases.size());
        for (LearnerKind base : config.settings.sl_bases)
            base_params.push_back(tune_for(base, data, config, replicate, cache).params);
        result = tune_super_learner_with(data, config.settings, seed, base_params);
    } else {
        result = tune_learner(data, kind, config.settings, seed);
    }
    return cache.emplace(id, std::move(result)).first->second;
}

struct MethodRun {
    ReplicateRecord record;
    BootstrapResult boot;
    double cv_auc = 0.5;
    const TuneResult* tuned = nullptr;
};

MethodRun run_method(const TrialDataset& data, LearnerKind kind, const RunConfig& config,
                     std::uint64_t replicate, std::map<int, TuneResult>& cache,
                     int bootstrap_workers) {
    const auto id = static_cast<std::uint64_t>(static_cast<int>(kind));
    const TuneResult& tuned = tune_for(kind, data, config, replicate, cache);
    auto model = fit_model(data, kind, config.settings, tuned.params,
                           derive_seed(config.seed, "fit", replicate, id));
    MarginalEffect point = estimate_marginal(*model, data);
    BootstrapResult boot =
        bootstrap_effect(data, kind, config.settings, tuned.params, config.bootstrap,
                         derive_seed(config.seed, "boot", replicate, id), point,
                         bootstrap_workers);

    MethodRun run;
    run.record.replicate = static_cast<int>(replicate);
    run.record.method = to_string(kind);
    run.record.theta_hat = point.log_mor;
    run.record.delta_hat = point.delta;
    run.record.pi0_hat = point.pi0;
    run.record.pi1_hat = point.pi1;
    run.record.sd_hat = boot.sd_logmor;
    run.record.ci_lower = boot.ci_logmor[0];
    run.record.ci_upper = boot.ci_logmor[1];
    run.record.sd_delta = boot.sd_delta;
    run.record.ci_delta_lower = boot.ci_delta[0];
    run.record.ci_delta_upper = boot.ci_delta[1];
    run.record.b_failed = boot.n_failed;
    run.record.warned = model->warned() || tuned.n_fold_failures > 0;
    run.cv_auc = tuned.cv_auc;
    run.tuned = &tuned;
    run.boot = std::move(boot);
    return run;
}

TrialDataset draw_replicate(const ScenarioSpec& spec, std::uint64_t replicate,
                            std::int64_t& resamples) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt >= 1000)
            throw NumericError("simulation replicate keeps drawing degenerate datasets");
        TrialDataset data = generate_dataset(spec, replicate, attempt);
        if (!dataset_degenerate(data)) {
            resamples = static_cast<std::int64_t>(attempt);
            return data;
        }
    }
}

std::vector<std::string> record_cells(const ReplicateRecord& r) {
    return {std::to_string(r.replicate),
            r.method,
            format_double(r.pi0_hat),
            format_double(r.pi1_hat),
            format_double(r.delta_hat),
            format_double(r.theta_hat),
            format_double(r.sd_hat),
            format_double(r.ci_lower),
            format_double(r.ci_upper),
            format_double(r.sd_delta),
            format_double(r.ci_delta_lower),
            format_double(r.ci_delta_upper),
            std::to_string(r.b_failed),
            r.warned ? "1" : "0"};
}

json load_json_file(const fs::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw DataError(std::string("cannot open ") + what + " file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed ") + what + " file " + path.string() + ": " +
                        e.what());
    }
}

int require_column(const CsvTable& table, const std::string& name, const fs::path& path) {
    int c = table.column(name);
    if (c < 0) throw DataError("records file " + path.string() + " lacks column " + name);
    return c;
}

} // namespace

void apply_config_file(RunConfig& config, const std::string& path) {
    json j = load_json_file(path, "config");
    if (!j.is_object()) throw DataError("config file " + path + " must hold a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "scenario") {
                auto s = scenario_from_string(value.get<std::string>());
                if (!s) throw DataError("unknown scenario \"" + value.get<std::string>() + "\"");
                config.scenario = *s;
            } else if (key == "n") {
                config.n = value.get<int>();
            } else if (key == "effect") {
                config.effect = value.get<double>();
            } else if (key == "replicates") {
                config.replicates = value.get<int>();
            } else if (key == "bootstrap") {
                config.bootstrap = value.get<int>();
            } else if (key == "learners") {
                std::vector<LearnerKind> kinds;
                for (const auto& name : value) {
                    auto kind = learner_kind_from_string(name.get<std::string>());
                    if (!kind)
                        throw DataError("unknown learner \"" + name.get<std::string>() + "\"");
                    kinds.push_back(*kind);
                }
                config.learners = std::move(kinds);
            } else if (key == "sl_bases") {
                std::vector<LearnerKind> kinds;
                for (const auto& name : value) {
                    auto kind = learner_kind_from_string(name.get<std::string>());
                    if (!kind)
                        throw DataError("unknown learner \"" + name.get<std::string>() + "\"");
                    kinds.push_back(*kind);
                }
                config.settings.sl_bases = std::move(kinds);
            } else if (key == "seed") {
                config.seed = value.get<std::uint64_t>();
                config.seed_set = true;
            } else if (key == "workers") {
                config.workers = value.get<int>();
            } else if (key == "out") {
                config.out_dir = value.get<std::string>();
            } else if (key == "dataset") {
                config.dataset_path = value.get<std::string>();
            } else if (key == "schema") {
                config.schema_path = value.get<std::string>();
            } else if (key == "folds") {
                config.settings.cv_folds = value.get<int>();
            } else if (key == "grid_length") {
                config.settings.grid_length = value.get<int>();
            } else if (key == "lambda_min_ratio") {
                config.settings.lambda_min_ratio = value.get<double>();
            } else if (key == "nn_decay") {
                config.settings.nn_decay = value.get<double>();
            } else if (key == "splines") {
                config.settings.penalized_design.use_splines = value.get<bool>();
            } else if (key == "interactions") {
                config.settings.penalized_design.use_treatment_interactions = value.get<bool>();
            } else if (key == "spline_degree") {
                config.settings.penalized_design.spline_degree = value.get<int>();
            } else if (key == "knots") {
                config.settings.penalized_design.n_interior_knots = value.get<int>();
            } else if (key == "auc_individuals") {
                config.auc_individuals = value.get<std::int64_t>();
            } else {
                throw DataError("unknown config key \"" + key + "\" in " + path);
            }
        }
    } catch (const json::exception& e) {
        throw DataError("config file " + path + ": " + e.what());
    }
}

void validate_config(const RunConfig& config) {
    if (!config.seed_set)
        throw DataError("a seed is required (--seed or the config \"seed\" key); "
                        "runs are never seeded from the clock");
    if (config.learners.empty()) throw DataError("the learner list is empty");
    if (config.n < 2) throw DataError("n must be at least 2");
    if (config.effect <= 0.0) throw DataError("effect must be a positive odds ratio");
    if (config.replicates < 1) throw DataError("replicates must be at least 1");
    if (config.bootstrap < 2) throw DataError("bootstrap must be at least 2");
    if (config.workers < 1) throw DataError("workers must be at least 1");
    if (config.settings.cv_folds < 2) throw DataError("folds must be at least 2");
    if (config.settings.grid_length < 1) throw DataError("grid_length must be at least 1");
    if (config.settings.lambda_min_ratio <= 0.0 || config.settings.lambda_min_ratio > 1.0)
        throw DataError("lambda_min_ratio must lie in (0, 1]");
    if (config.settings.nn_decay < 0.0) throw DataError("nn_decay must be nonnegative");
    if (config.settings.penalized_design.spline_degree < 1)
        throw DataError("spline_degree must be at least 1");
    if (config.settings.penalized_design.n_interior_knots < 0)
        throw DataError("knots must be nonnegative");
    if (config.auc_individuals < 2) throw DataError("auc_individuals must be at least 2");
    if (config.settings.sl_bases.empty()) throw DataError("sl_bases is empty");
    for (LearnerKind base : config.settings.sl_bases)
        if (base == LearnerKind::superlearner)
            throw DataError("the super learner cannot be one of its own bases");
}

SimulateSummary cmd_simulate(const RunConfig& config) {
    validate_config(config);
    const fs::path out = ensure_out_dir(config.out_dir);
    const auto S = static_cast<std::size_t>(config.replicates);
    const auto M = config.learners.size();
    const ScenarioSpec spec{config.scenario, config.n, std::log(config.effect), config.seed};

    struct Cell {
        std::vector<std::optional<ReplicateRecord>> rows;
        std::vector<std::string> failures;
        std::int64_t resamples = 0;
    };
    std::vector<Cell> cells(S);

    parallel_for(S, config.workers, [&](std::size_t r) {
        Cell& cell = cells[r];
        cell.rows.resize(M);
        TrialDataset data = draw_replicate(spec, r, cell.resamples);
        std::map<int, TuneResult> cache;
        for (std::size_t m = 0; m < M; ++m) {
            const LearnerKind kind = config.learners[m];
            try {
                cell.rows[m] = run_method(data, kind, config, r, cache, 1).record;
            } catch (const Error& e) {
                cell.failures.push_back("replicate " + std::to_string(r) + " " +
                                        to_string(kind) + ": " + e.what());
            }
        }
    });

    SimulateSummary summary;
    for (LearnerKind kind : config.learners) {
        summary.pipeline_failures[to_string(kind)] = 0;
        summary.bootstrap_failures[to_string(kind)] = 0;
    }
    std::vector<std::string> failure_log;

    CsvWriter writer(out / "records.csv", kRecordColumns);
    for (std::size_t r = 0; r < S; ++r) {
        summary.dataset_resamples += cells[r].resamples;
        for (std::size_t m = 0; m < M; ++m) {
            const std::string name = to_string(config.learners[m]);
            const auto& row = cells[r].rows[m];
            if (row) {
                writer.write_row(record_cells(*row));
                summary.bootstrap_failures[name] += row->b_failed;
                summary.records.push_back(*row);
            } else {
                summary.pipeline_failures[name] += 1;
            }
        }
        for (const auto& msg : cells[r].failures) failure_log.push_back(msg);
    }

    json manifest = base_echo(config, "simulate");
    manifest.update(cell_echo(config));
    manifest.update(learner_echo(config));
    manifest["replicates"] = config.replicates;
    manifest["records_file"] = "records.csv";
    manifest["dataset_resamples"] = summary.dataset_resamples;
    manifest["pipeline_failures"] = summary.pipeline_failures;
    manifest["bootstrap_failures"] = summary.bootstrap_failures;
    manifest["failure_log"] = failure_log;
    const fs::path manifest_path = out / "manifest.json";
    write_json_file(manifest_path, manifest);

    summary.records_path = (out / "records.csv").string();
    summary.manifest_path = manifest_path.string();
    return summary;
}

CalibrateSummary cmd_calibrate(const RunConfig& config) {
    validate_config(config);
    const fs::path out = ensure_out_dir(config.out_dir);
    const ScenarioSpec spec{config.scenario, config.n, std::log(config.effect), config.seed};

    CalibrateSummary summary;
    summary.truth = calibrate_truth(spec, config.replicates, config.workers);
    summary.theoretical_auc = theoretical_auc(spec, config.auc_individuals);

    json j = base_echo(config, "calibrate");
    j.update(cell_echo(config));
    j["replicates"] = config.replicates;
    j["pi0"] = summary.truth.pi0;
    j["pi1"] = summary.truth.pi1;
    j["delta"] = summary.truth.delta;
    j["log_mor"] = summary.truth.log_mor;
    j["mor"] = std::exp(summary.truth.log_mor);
    j["mc_se"] = summary.truth.mc_se;
    j["n_resampled"] = summary.truth.n_resampled;
    j["theoretical_auc"] = summary.theoretical_auc;
    j["auc_individuals"] = config.auc_individuals;
    const fs::path truth_path = out / "truth.json";
    write_json_file(truth_path, j);
    summary.truth_path = truth_path.string();
    return summary;
}

AnalyzeSummary cmd_analyze(const RunConfig& config) {
    validate_config(config);
    if (config.dataset_path.empty())
        throw DataError(
            "analyze needs a dataset CSV (positional argument or the config \"dataset\" key)");
    const fs::path out = ensure_out_dir(config.out_dir);

    const CsvTable table = read_csv(config.dataset_path);
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
            const std::string& cell = table.rows[r][c];
            if (cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan" ||
                cell == ".")
                throw DataError("missing value in " + config.dataset_path + " at data row " +
                                std::to_string(r + 1) + ", column " + table.header[c] +
                                "; the analysis needs complete cases, so drop or impute "
                                "incomplete rows first");
        }

    std::optional<fs::path> schema;
    if (!config.schema_path.empty()) schema = config.schema_path;
    const TrialDataset data = load_dataset(config.dataset_path, schema);
    if (data.y.minCoeff() == data.y.maxCoeff())
        throw DegenerateOutcome("the outcome column is constant; no effect is estimable");

    AnalyzeSummary summary;
    std::map<int, TuneResult> cache;
    json methods = json::object();
    std::exception_ptr first_error;

    for (LearnerKind kind : config.learners) {
        const std::string name = to_string(kind);
        try {
            MethodRun run = run_method(data, kind, config, 0, cache, config.workers);
            AnalyzeRow row;
            row.method = name;
            row.log_mor = run.record.theta_hat;
            row.ci_lower = run.record.ci_lower;
            row.ci_upper = run.record.ci_upper;
            row.sd = run.record.sd_hat;
            row.auc = run.cv_auc;
            row.pi0 = run.record.pi0_hat;
            row.pi1 = run.record.pi1_hat;
            row.delta = run.record.delta_hat;
            row.delta_ci_lower = run.record.ci_delta_lower;
            row.delta_ci_upper = run.record.ci_delta_upper;
            row.sd_delta = run.record.sd_delta;
            row.b_failed = run.record.b_failed;
            row.warned = run.record.warned;
            summary.rows.push_back(row);

            json m;
            m["pi0"] = row.pi0;
            m["pi1"] = row.pi1;
            m["delta"] = row.delta;
            m["delta_ci"] = {row.delta_ci_lower, row.delta_ci_upper};
            m["sd_delta"] = row.sd_delta;
            m["log_mor"] = row.log_mor;
            m["log_mor_ci"] = {row.ci_lower, row.ci_upper};
            m["sd_log_mor"] = row.sd;
            m["mor"] = std::exp(row.log_mor);
            m["cv_auc"] = row.auc;
            m["b_failed"] = row.b_failed;
            m["warned"] = row.warned;
            m["fold_failures"] = run.tuned->n_fold_failures;
            m["params"] = json::parse(tuned_params_to_json(kind, run.tuned->params));
            methods[name] = std::move(m);
        } catch (const Error& e) {
            if (!first_error) first_error = std::current_exception();
            summary.failures.push_back(name + ": " + e.what());
        }
    }
    if (summary.rows.empty() && first_error) std::rethrow_exception(first_error);

    CsvWriter writer(out / "forest.csv",
                     {"method", "log_mor", "ci_lower", "ci_upper", "sd", "auc"});
    for (const auto& row : summary.rows)
        writer.write_row({row.method, format_double(row.log_mor), format_double(row.ci_lower),
                          format_double(row.ci_upper), format_double(row.sd),
                          format_double(row.auc)});

    json manifest = base_echo(config, "analyze");
    manifest.update(learner_echo(config));
    manifest["dataset"] = config.dataset_path;
    if (!config.schema_path.empty()) manifest["schema"] = config.schema_path;
    manifest["n"] = static_cast<std::int64_t>(data.n());
    manifest["covariates"] = static_cast<std::int64_t>(data.p());
    manifest["forest_file"] = "forest.csv";
    manifest["methods"] = std::move(methods);
    manifest["failures"] = summary.failures;
    const fs::path manifest_path = out / "analysis.json";
    write_json_file(manifest_path, manifest);

    summary.forest_path = (out / "forest.csv").string();
    summary.manifest_path = manifest_path.string();
    return summary;
}

namespace {

std::vector<ReplicateRecord> read_records(const fs::path& path) {
    const CsvTable table = read_csv(path);
    const int c_rep = require_column(table, "replicate", path);
    const int c_method = require_column(table, "method", path);
    const int c_pi0 = require_column(table, "pi0_hat", path);
    const int c_pi1 = require_column(table, "pi1_hat", path);
    const int c_delta = require_column(table, "delta_hat", path);
    const int c_theta = require_column(table, "theta_hat", path);
    const int c_sd = require_column(table, "sd_hat", path);
    const int c_lo = require_column(table, "ci_lower", path);
    const int c_hi = require_column(table, "ci_upper", path);
    const int c_sdd = require_column(table, "sd_delta", path);
    const int c_dlo = require_column(table, "ci_delta_lower", path);
    const int c_dhi = require_column(table, "ci_delta_upper", path);
    const int c_bf = require_column(table, "b_failed", path);
    const int c_warn = require_column(table, "warned", path);

    std::vector<ReplicateRecord> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        ReplicateRecord r;
        r.replicate = static_cast<int>(parse_double(row[static_cast<std::size_t>(c_rep)]));
        r.method = row[static_cast<std::size_t>(c_method)];
        r.pi0_hat = parse_double(row[static_cast<std::size_t>(c_pi0)]);
        r.pi1_hat = parse_double(row[static_cast<std::size_t>(c_pi1)]);
        r.delta_hat = parse_double(row[static_cast<std::size_t>(c_delta)]);
        r.theta_hat = parse_double(row[static_cast<std::size_t>(c_theta)]);
        r.sd_hat = parse_double(row[static_cast<std::size_t>(c_sd)]);
        r.ci_lower = parse_double(row[static_cast<std::size_t>(c_lo)]);
        r.ci_upper = parse_double(row[static_cast<std::size_t>(c_hi)]);
        r.sd_delta = parse_double(row[static_cast<std::size_t>(c_sdd)]);
        r.ci_delta_lower = parse_double(row[static_cast<std::size_t>(c_dlo)]);
        r.ci_delta_upper = parse_double(row[static_cast<std::size_t>(c_dhi)]);
        r.b_failed = static_cast<int>(parse_double(row[static_cast<std::size_t>(c_bf)]));
        r.warned = row[static_cast<std::size_t>(c_warn)] == "1";
        records.push_back(std::move(r));
    }
    return records;
}

std::string fixed(double v, int width, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%*.*f", width, precision, v);
    return buf;
}

std::string pad(const std::string& s, int width) {
    if (static_cast<int>(s.size()) >= width) return s;
    return s + std::string(static_cast<std::size_t>(width) - s.size(), ' ');
}

} // namespace

ReportSummary cmd_report(const std::vector<std::string>& records_files,
                         const std::string& truth_file, const std::string& out_dir) {
    if (records_files.empty()) throw DataError("report needs at least one records file");
    const fs::path out = ensure_out_dir(out_dir);

    const json tj = load_json_file(truth_file, "truth");
    TruthRecord truth;
    std::string truth_scenario;
    double truth_effect = 0.0;
    try {
        truth_scenario = tj.at("scenario").get<std::string>();
        truth_effect = tj.at("effect").get<double>();
        truth.pi0 = tj.at("pi0").get<double>();
        truth.pi1 = tj.at("pi1").get<double>();
        truth.delta = tj.at("delta").get<double>();
        truth.log_mor = tj.at("log_mor").get<double>();
        truth.n_reps = tj.at("replicates").get<std::int64_t>();
        truth.mc_se = tj.at("mc_se").get<double>();
    } catch (const json::exception& e) {
        throw DataError("truth file " + truth_file + " lacks a required key: " + e.what());
    }

    ReportSummary summary;
    summary.true_mor = std::exp(truth.log_mor);

    CsvWriter writer(out / "report.csv",
                     {"scenario", "n", "effect", "true_mor", "method", "s_effective", "mb_pi0",
                      "mb_pi1", "mb_logmor", "mb_delta", "rmse", "veb", "coverage", "error",
                      "error_wald", "rss"});
    std::string text;

    for (const auto& records_file : records_files) {
        const fs::path records_path(records_file);
        const fs::path manifest_path = records_path.parent_path() / "manifest.json";
        const json mj = load_json_file(manifest_path, "manifest");

        std::string scenario;
        int n = 0;
        double effect = 0.0;
        std::vector<std::string> methods;
        try {
            scenario = mj.at("scenario").get<std::string>();
            n = mj.at("n").get<int>();
            effect = mj.at("effect").get<double>();
            for (const auto& name : mj.at("learners")) methods.push_back(name.get<std::string>());
        } catch (const json::exception& e) {
            throw DataError("manifest " + manifest_path.string() +
                            " lacks a required key: " + e.what());
        }
        if (scenario != truth_scenario ||
            std::abs(effect - truth_effect) > 1e-9 * std::max(1.0, std::abs(truth_effect)))
            throw DataError("records " + records_file + " are for scenario " + scenario +
                            ", effect " + format_double(effect) + " but the truth file holds " +
                            truth_scenario + ", effect " + format_double(truth_effect));

        const std::vector<ReplicateRecord> records = read_records(records_path);
        ReportBlock block;
        block.scenario = scenario;
        block.n = n;
        block.effect = effect;
        block.report = build_report(records, truth, methods);

        text += "scenario " + scenario + ", n " + std::to_string(n) + ", conditional OR " +
                format_double(effect) + ", true mOR " + fixed(summary.true_mor, 0, 4) +
                " (log mOR " + fixed(truth.log_mor, 0, 4) + ", " +
                std::to_string(truth.n_reps) + " calibration replicates)\n";
        text += pad("method", 14) + pad("S", 7) + pad("MB pi0%", 9) + pad("MB pi1%", 9) +
                pad("MB logmOR", 11) + pad("MB delta%", 11) + pad("RMSE", 8) + pad("VEB%", 8) +
                pad("Cover%", 8) + pad("Error%", 8) + pad("RSS%", 8) + "\n";
        for (const auto& m : block.report.methods) {
            std::vector<std::string> cells = {scenario,
                                              std::to_string(n),
                                              format_double(effect),
                                              format_double(summary.true_mor),
                                              m.method,
                                              std::to_string(m.s_effective),
                                              format_double(m.mb_pi0),
                                              format_double(m.mb_pi1),
                                              format_double(m.mb_logmor),
                                              format_double(m.mb_delta),
                                              format_double(m.rmse),
                                              format_double(m.veb),
                                              format_double(m.coverage),
                                              format_double(m.error_rate),
                                              format_double(m.error_rate_wald),
                                              m.rss ? format_double(*m.rss) : std::string()};
            writer.write_row(cells);
            text += pad(m.method, 14) + pad(std::to_string(m.s_effective), 7) +
                    fixed(m.mb_pi0, 8, 2) + " " + fixed(m.mb_pi1, 8, 2) + " " +
                    fixed(m.mb_logmor, 10, 4) + " " + fixed(m.mb_delta, 10, 2) + " " +
                    fixed(m.rmse, 7, 4) + " " + fixed(m.veb, 7, 2) + " " +
                    fixed(m.coverage, 7, 2) + " " + fixed(m.error_rate, 7, 2) + " " +
                    (m.rss ? fixed(*m.rss, 7, 2) : pad("      -", 7)) + "\n";
        }
        text += "\n";
        summary.blocks.push_back(std::move(block));
    }

    const fs::path text_path = out / "report.txt";
    std::ofstream text_out(text_path);
    if (!text_out) throw DataError("cannot open " + text_path.string() + " for writing");
    text_out << text;

    summary.csv_path = (out / "report.csv").string();
    summary.text_path = text_path.string();
    summary.text = std::move(text);
    return summary;
}

} // namespace gcml
