#include "gcml/simgen.hpp"

#include <cmath>

#include "gcml/errors.hpp"
#include "gcml/parallel.hpp"
#include "gcml/rng.hpp"
#include "gcml/tuning.hpp"

namespace gcml {

std::string to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::complex: return "complex";
        case Scenario::simple: return "simple";
        case Scenario::simple_reduced: return "simple_reduced";
    }
    return "unknown";
}

std::optional<Scenario> scenario_from_string(const std::string& name) {
    if (name == "complex") return Scenario::complex;
    if (name == "simple") return Scenario::simple;
    if (name == "simple_reduced" || name == "reduced") return Scenario::simple_reduced;
    return std::nullopt;
}

namespace {

constexpr int kComplexCovariates = 17;
constexpr int kSimpleCovariates = 6;

struct RowDraw {
    double x[kComplexCovariates];
    double a;
    double eta;
    double y;
};

// Table order, one fresh unit normal per covariate; beta0 = -0.4,
// beta1 = log 2, beta2 = -2, beta3 = log 2. The covariate chains for X3 and
// X12 use beta1 on both parents: that parameterization reproduces the
// published truth values (pi0 = 0.4604, delta = 0.1503, theoretical AUC
// 0.8904, and a null marginal OR at beta4 = log 0.9729), none of which hold
// with the outcome intercept beta2 = -2 in those means.
void draw_complex_row(double beta4, RngStream& rng, RowDraw& row) {
    const double b0 = -0.4;
    const double b1 = std::log(2.0);
    const double b2 = -2.0;
    const double b3 = std::log(2.0);

    double* x = row.x;
    x[0] = rng.normal();                                              // X1
    x[1] = b0 + b1 * x[0] + rng.normal();                             // X2
    x[2] = b0 - b1 * x[0] - b1 * x[1] + rng.normal();                 // X3
    x[3] = rng.normal();                                              // X4
    x[4] = rng.normal() > 0.67 ? 1.0 : 0.0;                           // X5
    x[5] = (b0 - b1 * x[3] + rng.normal()) > -0.40 ? 1.0 : 0.0;       // X6
    x[6] = b0 - b1 * x[4] + rng.normal();                             // X7
    x[7] = (b0 + b1 * x[5] + rng.normal()) > -0.80 ? 1.0 : 0.0;       // X8
    x[8] = b0 + b1 * x[6] + rng.normal();                             // X9
    x[9] = rng.normal();                                              // X10
    x[10] = (b0 + b1 * x[7] + rng.normal()) > 0.84 ? 1.0 : 0.0;       // X11
    x[11] = b0 - b1 * x[10] - b1 * x[9] + rng.normal();               // X12
    x[12] = b0 - b1 * x[10] + rng.normal();                           // X13
    x[13] = rng.normal();                                             // X14
    x[14] = rng.normal() > 0.67 ? 1.0 : 0.0;                          // X15
    x[15] = rng.normal() > 0.67 ? 1.0 : 0.0;                          // X16
    x[16] = rng.normal();                                             // X17

    row.a = rng.normal() > 0.0 ? 1.0 : 0.0;
    row.eta = b2 + b3 * (x[1] > -0.44 ? 1.0 : 0.0) - b3 * x[2] + 0.5 * b3 * x[2] * x[2] +
              b3 * x[4] + b3 * x[5] + b3 * x[8] + 0.5 * b3 * x[9] * x[9] - b3 * x[11] -
              b3 * (x[12] > -0.55 ? 1.0 : 0.0) + b3 * x[13] + b3 * x[14] +
              0.5 * b3 * row.a * x[13] + beta4 * row.a;
    double p = 1.0 / (1.0 + std::exp(-row.eta));
    row.y = rng.uniform01() < p ? 1.0 : 0.0;
}

void draw_simple_row(double beta2, bool reduced, RngStream& rng, RowDraw& row) {
    const double b0 = reduced ? -0.6 : -3.0;
    const double b1 = reduced ? 0.2 : std::log(4.0);

    double* x = row.x;
    x[0] = rng.normal();                                   // X1
    x[1] = rng.normal();                                   // X2
    x[2] = rng.normal();                                   // X3
    x[3] = rng.normal() < -0.67 ? 1.0 : 0.0;               // X4
    x[4] = rng.normal() < 0.0 ? 1.0 : 0.0;                 // X5
    x[5] = rng.normal() < 0.67 ? 1.0 : 0.0;                // X6

    row.a = rng.normal() > 0.0 ? 1.0 : 0.0;
    row.eta = b0 + b1 * (x[0] + x[1] + x[3] + x[4]) + beta2 * row.a;
    double p = 1.0 / (1.0 + std::exp(-row.eta));
    row.y = rng.uniform01() < p ? 1.0 : 0.0;
}

void draw_row(const ScenarioSpec& spec, RngStream& rng, RowDraw& row) {
    if (spec.scenario == Scenario::complex)
        draw_complex_row(spec.effect, rng, row);
    else
        draw_simple_row(spec.effect, spec.scenario == Scenario::simple_reduced, rng, row);
}

void scenario_columns(Scenario scenario, std::vector<std::string>& names,
                      std::vector<ColumnKind>& kinds) {
    names.clear();
    kinds.clear();
    if (scenario == Scenario::complex) {
        static const bool binary[kComplexCovariates] = {false, false, false, false, true, true,
                                                        false, true,  false, false, true, false,
                                                        false, false, true,  true,  false};
        for (int j = 0; j < kComplexCovariates; ++j) {
            names.push_back("x" + std::to_string(j + 1));
            kinds.push_back(binary[j] ? ColumnKind::binary : ColumnKind::continuous);
        }
    } else {
        static const bool binary[kSimpleCovariates] = {false, false, false, true, true, true};
        for (int j = 0; j < kSimpleCovariates; ++j) {
            names.push_back("x" + std::to_string(j + 1));
            kinds.push_back(binary[j] ? ColumnKind::binary : ColumnKind::continuous);
        }
    }
}

} // namespace

TrialDataset generate_dataset(const ScenarioSpec& spec, std::uint64_t replicate,
                              std::uint64_t attempt, Eigen::VectorXd* eta_out) {
    if (spec.n < 2) throw DataError("scenario n must be >= 2");
    const int p = spec.scenario == Scenario::complex ? kComplexCovariates : kSimpleCovariates;

    TrialDataset data;
    scenario_columns(spec.scenario, data.column_names, data.column_kinds);
    data.y.resize(spec.n);
    data.a.resize(spec.n);
    data.x.resize(spec.n, p);
    if (eta_out) eta_out->resize(spec.n);

    RngStream rng(derive_seed(spec.seed, "sim", replicate, attempt));
    RowDraw row;
    for (Eigen::Index i = 0; i < spec.n; ++i) {
        draw_row(spec, rng, row);
        for (int j = 0; j < p; ++j) data.x(i, j) = row.x[j];
        data.a[i] = row.a;
        data.y[i] = row.y;
        if (eta_out) (*eta_out)[i] = row.eta;
    }
    return data;
}

TrialDataset generate_complex(Eigen::Index n, double beta4, std::uint64_t seed) {
    return generate_dataset({Scenario::complex, n, beta4, seed});
}

TrialDataset generate_simple(Eigen::Index n, double beta2, bool reduced, std::uint64_t seed) {
    return generate_dataset(
        {reduced ? Scenario::simple_reduced : Scenario::simple, n, beta2, seed});
}

TruthRecord calibrate_truth(const ScenarioSpec& spec, std::int64_t n_reps, int workers) {
    if (n_reps < 2) throw NumericError("truth calibration needs n_reps >= 2");

    std::vector<double> p0(static_cast<std::size_t>(n_reps));
    std::vector<double> p1(static_cast<std::size_t>(n_reps));
    std::vector<double> log_or(static_cast<std::size_t>(n_reps));
    std::vector<std::int64_t> resampled(static_cast<std::size_t>(n_reps), 0);

    parallel_for(static_cast<std::size_t>(n_reps), workers, [&](std::size_t r) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt >= 1000)
                throw NumericError("truth calibration: replicate keeps degenerating");
            RngStream rng(derive_seed(spec.seed, "sim", r, attempt));
            RowDraw row;
            double events0 = 0.0, events1 = 0.0, n0 = 0.0, n1 = 0.0;
            for (Eigen::Index i = 0; i < spec.n; ++i) {
                draw_row(spec, rng, row);
                if (row.a == 1.0) {
                    n1 += 1.0;
                    events1 += row.y;
                } else {
                    n0 += 1.0;
                    events0 += row.y;
                }
            }
            if (n0 == 0.0 || n1 == 0.0 || events0 == 0.0 || events1 == 0.0 || events0 == n0 ||
                events1 == n1) {
                ++resampled[r];
                continue;
            }
            double q0 = events0 / n0;
            double q1 = events1 / n1;
            p0[r] = q0;
            p1[r] = q1;
            log_or[r] = std::log(q1 / (1.0 - q1)) - std::log(q0 / (1.0 - q0));
            break;
        }
    });

    TruthRecord truth;
    truth.n_reps = n_reps;
    double sum0 = 0.0, sum1 = 0.0, sum_lor = 0.0;
    for (std::size_t r = 0; r < p0.size(); ++r) {
        sum0 += p0[r];
        sum1 += p1[r];
        sum_lor += log_or[r];
        truth.n_resampled += resampled[r];
    }
    const double s = static_cast<double>(n_reps);
    truth.pi0 = sum0 / s;
    truth.pi1 = sum1 / s;
    truth.log_mor = sum_lor / s;
    truth.delta = truth.pi1 - truth.pi0;

    double ss = 0.0;
    for (double v : log_or) ss += (v - truth.log_mor) * (v - truth.log_mor);
    truth.mc_se = std::sqrt(ss / (s - 1.0)) / std::sqrt(s);
    return truth;
}

bool dataset_degenerate(const TrialDataset& data) {
    double n0 = 0.0, n1 = 0.0, events0 = 0.0, events1 = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        if (data.a[i] == 1.0) {
            n1 += 1.0;
            events1 += data.y[i];
        } else {
            n0 += 1.0;
            events0 += data.y[i];
        }
    }
    return n0 == 0.0 || n1 == 0.0 || events0 == 0.0 || events1 == 0.0 || events0 == n0 ||
           events1 == n1;
}

double theoretical_auc(const ScenarioSpec& spec, std::int64_t n_individuals) {
    Eigen::VectorXd eta(n_individuals), y(n_individuals);
    RngStream rng(derive_seed(spec.seed, "auc", 0, 0));
    RowDraw row;
    for (std::int64_t i = 0; i < n_individuals; ++i) {
        draw_row(spec, rng, row);
        eta[i] = row.eta;
        y[i] = row.y;
    }
    return compute_auc(eta, y);
}

} // namespace gcml
