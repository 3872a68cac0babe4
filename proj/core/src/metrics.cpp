#include "gcml/metrics.hpp"

#include <cmath>

#include "gcml/errors.hpp"

namespace gcml {

double mean_bias(const std::vector<double>& estimates, double truth) {
    if (estimates.empty()) throw NumericError("mean_bias needs at least one replicate");
    double sum = 0.0;
    for (double e : estimates) sum += e - truth;
    return sum / static_cast<double>(estimates.size());
}

double variance_estimation_bias(const std::vector<double>& estimates,
                                const std::vector<double>& sds, double truth) {
    if (estimates.size() < 2 || estimates.size() != sds.size())
        throw NumericError("variance_estimation_bias needs matched records, S >= 2");
    double ss = 0.0;
    for (double e : estimates) ss += (e - truth) * (e - truth);
    double emp_sd = std::sqrt(ss / static_cast<double>(estimates.size() - 1));
    if (emp_sd == 0.0) throw NumericError("empirical SD is zero; VEB undefined");
    double mean_sd = 0.0;
    for (double s : sds) mean_sd += s;
    mean_sd /= static_cast<double>(sds.size());
    return (mean_sd - emp_sd) / emp_sd * 100.0;
}

double rmse_value(const std::vector<double>& estimates, double truth) {
    if (estimates.empty()) throw NumericError("rmse needs at least one replicate");
    double ss = 0.0;
    for (double e : estimates) ss += (e - truth) * (e - truth);
    return std::sqrt(ss / static_cast<double>(estimates.size()));
}

double coverage_pct(const std::vector<std::array<double, 2>>& cis, double truth) {
    if (cis.empty()) throw NumericError("coverage needs at least one replicate");
    double covered = 0.0;
    for (const auto& ci : cis)
        if (ci[0] <= truth && truth <= ci[1]) covered += 1.0;
    return covered / static_cast<double>(cis.size()) * 100.0;
}

double rejection_pct(const std::vector<std::array<double, 2>>& cis) {
    if (cis.empty()) throw NumericError("rejection rate needs at least one replicate");
    double rejected = 0.0;
    for (const auto& ci : cis)
        if (ci[0] > 0.0 || ci[1] < 0.0) rejected += 1.0;
    return rejected / static_cast<double>(cis.size()) * 100.0;
}

double reduction_in_sample_size(const std::vector<double>& adj_theta,
                                const std::vector<double>& adj_sd,
                                const std::vector<double>& ref_theta,
                                const std::vector<double>& ref_sd) {
    auto z_of = [](const std::vector<double>& theta, const std::vector<double>& sd) {
        double st = 0.0, ss = 0.0;
        for (double t : theta) st += t;
        for (double s : sd) ss += s;
        if (ss == 0.0) throw NumericError("zero summed SD in RSS");
        return st / ss;
    };
    double z_adj = z_of(adj_theta, adj_sd);
    double z_ref = z_of(ref_theta, ref_sd);
    if (z_adj == 0.0) throw NumericError("zero adjusted z in RSS");
    double ratio = z_ref / z_adj;
    return (1.0 - ratio * ratio) * 100.0;
}

MetricsReport build_report(const std::vector<ReplicateRecord>& records, const TruthRecord& truth,
                           const std::vector<std::string>& methods,
                           const std::string& ref_method) {
    MetricsReport report;
    report.truth_is_null = std::abs(truth.log_mor) < 0.01;

    auto collect = [&](const std::string& method) {
        std::vector<const ReplicateRecord*> rows;
        for (const auto& r : records)
            if (r.method == method) rows.push_back(&r);
        return rows;
    };
    auto ref_rows = collect(ref_method);

    for (const auto& method : methods) {
        auto rows = collect(method);
        if (rows.empty()) continue;

        std::vector<double> theta, delta, pi0, pi1, sd;
        std::vector<std::array<double, 2>> cis;
        for (const auto* r : rows) {
            theta.push_back(r->theta_hat);
            delta.push_back(r->delta_hat);
            pi0.push_back(r->pi0_hat);
            pi1.push_back(r->pi1_hat);
            sd.push_back(r->sd_hat);
            cis.push_back({r->ci_lower, r->ci_upper});
        }

        MethodMetrics m;
        m.method = method;
        m.s_effective = static_cast<int>(rows.size());
        m.mb_pi0 = mean_bias(pi0, truth.pi0) * 100.0;
        m.mb_pi1 = mean_bias(pi1, truth.pi1) * 100.0;
        m.mb_delta = mean_bias(delta, truth.delta) * 100.0;
        m.mb_logmor = mean_bias(theta, truth.log_mor);
        m.veb = rows.size() >= 2 ? variance_estimation_bias(theta, sd, truth.log_mor) : 0.0;
        m.rmse = rmse_value(theta, truth.log_mor);
        m.coverage = coverage_pct(cis, truth.log_mor);
        double rejection = rejection_pct(cis);
        m.error_rate = report.truth_is_null ? rejection : 100.0 - rejection;

        double wald_rejected = 0.0;
        for (const auto* r : rows)
            if (r->sd_hat > 0.0 && std::abs(r->theta_hat / r->sd_hat) > 1.959963984540054)
                wald_rejected += 1.0;
        double wald_pct = wald_rejected / static_cast<double>(rows.size()) * 100.0;
        m.error_rate_wald = report.truth_is_null ? wald_pct : 100.0 - wald_pct;

        if (!report.truth_is_null && !ref_rows.empty() && method != ref_method) {
            std::vector<double> rt, rs;
            for (const auto* r : ref_rows) {
                rt.push_back(r->theta_hat);
                rs.push_back(r->sd_hat);
            }
            m.rss = reduction_in_sample_size(theta, sd, rt, rs);
        }
        report.methods.push_back(std::move(m));
    }
    if (report.methods.empty()) throw DataError("no records matched the requested methods");
    return report;
}

} // namespace gcml
