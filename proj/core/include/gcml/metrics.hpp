#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gcml/simgen.hpp"

namespace gcml {

/// One (simulation replicate, method) result. theta is the log mOR, with its
/// bootstrap SD and percentile CI; the delta-scale CI is carried as an extra
/// output column.
struct ReplicateRecord {
    int replicate = 0;
    std::string method;
    double theta_hat = 0.0;
    double delta_hat = 0.0;
    double pi0_hat = 0.0;
    double pi1_hat = 0.0;
    double sd_hat = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double sd_delta = 0.0;
    double ci_delta_lower = 0.0;
    double ci_delta_upper = 0.0;
    int b_failed = 0;
    bool warned = false;
};

struct MethodMetrics {
    std::string method;
    int s_effective = 0;
    double mb_pi0 = 0.0;   // percent
    double mb_pi1 = 0.0;   // percent
    double mb_delta = 0.0; // percent
    double mb_logmor = 0.0;
    double veb = 0.0;      // percent, log mOR scale
    double rmse = 0.0;     // log mOR scale
    double coverage = 0.0; // percent
    double error_rate = 0.0;          // percent; type I under the null, type II otherwise
    double error_rate_wald = 0.0;     // auxiliary Wald-z version of the same rate
    std::optional<double> rss;        // percent vs the reference method; empty under the null
};

struct MetricsReport {
    std::vector<MethodMetrics> methods;
    bool truth_is_null = false;
};

double mean_bias(const std::vector<double>& estimates, double truth);

/// [(mean estimated SD - empirical SD) / empirical SD] * 100, with the
/// truth-centered empirical SD sqrt(sum (theta-truth)^2 / (S-1)).
double variance_estimation_bias(const std::vector<double>& estimates,
                                const std::vector<double>& sds, double truth);

double rmse_value(const std::vector<double>& estimates, double truth);

/// Percent of closed intervals containing the truth.
double coverage_pct(const std::vector<std::array<double, 2>>& cis, double truth);

/// Percent of intervals excluding 0.
double rejection_pct(const std::vector<std::array<double, 2>>& cis);

/// (1 - (z_ref/z_adj)^2) * 100 with z = sum(theta) / sum(sd), sums over
/// replicates.
double reduction_in_sample_size(const std::vector<double>& adj_theta,
                                const std::vector<double>& adj_sd,
                                const std::vector<double>& ref_theta,
                                const std::vector<double>& ref_sd);

/// Aggregates records into per-method rows in the order of `methods`.
/// Methods absent from the records are skipped; RSS is computed against
/// ref_method and omitted when the truth is null (|log mOR| < 0.01).
MetricsReport build_report(const std::vector<ReplicateRecord>& records, const TruthRecord& truth,
                           const std::vector<std::string>& methods,
                           const std::string& ref_method = "unadjusted");

} // namespace gcml
