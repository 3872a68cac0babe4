#include "gcml/svm.hpp"

#include <algorithm>
#include <cmath>

#include "gcml/errors.hpp"

namespace gcml {

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v, double gamma) {
    Eigen::MatrixXd k(u.rows(), v.rows());
    for (Eigen::Index i = 0; i < u.rows(); ++i)
        for (Eigen::Index j = 0; j < v.rows(); ++j)
            k(i, j) = std::exp(-gamma * (u.row(i) - v.row(j)).squaredNorm());
    return k;
}

double svm_dual_objective(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& s,
                          const Eigen::VectorXd& alpha) {
    Eigen::VectorXd as = alpha.cwiseProduct(s);
    return alpha.sum() - 0.5 * as.dot(kernel * as);
}

double median_pairwise_gamma(const Eigen::MatrixXd& z) {
    const Eigen::Index n = z.rows();
    std::vector<double> d2;
    d2.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            d2.push_back((z.row(i) - z.row(j)).squaredNorm());
    if (d2.empty()) return 1.0;
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2), d2.end());
    double med = d2[d2.size() / 2];
    if (med <= 0.0) return 1.0 / static_cast<double>(z.cols() == 0 ? 1 : z.cols());
    return 1.0 / med;
}

namespace {

void platt_targets(const Eigen::VectorXd& y, Eigen::VectorXd& t) {
    double npos = y.sum();
    double nneg = static_cast<double>(y.size()) - npos;
    double hi = (npos + 1.0) / (npos + 2.0);
    double lo = 1.0 / (nneg + 2.0);
    t.resize(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) t[i] = y[i] == 1.0 ? hi : lo;
}

} // namespace

double platt_objective(const Eigen::VectorXd& decision, const Eigen::VectorXd& y, double a,
                       double b) {
    Eigen::VectorXd t;
    platt_targets(y, t);
    double obj = 0.0;
    for (Eigen::Index i = 0; i < decision.size(); ++i) {
        double fab = a * decision[i] + b;
        // -t*log(p) - (1-t)*log(1-p), computed without overflow
        if (fab >= 0)
            obj += t[i] * fab + std::log1p(std::exp(-fab));
        else
            obj += (t[i] - 1.0) * fab + std::log1p(std::exp(fab));
    }
    return obj;
}

Eigen::Vector2d platt_grad(const Eigen::VectorXd& decision, const Eigen::VectorXd& y, double a,
                           double b) {
    Eigen::VectorXd t;
    platt_targets(y, t);
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (Eigen::Index i = 0; i < decision.size(); ++i) {
        double fab = a * decision[i] + b;
        double p = fab >= 0 ? std::exp(-fab) / (1.0 + std::exp(-fab)) : 1.0 / (1.0 + std::exp(fab));
        double d = t[i] - p; // d/dfab of the objective
        g[0] += d * decision[i];
        g[1] += d;
    }
    return g;
}

std::pair<double, double> fit_platt(const Eigen::VectorXd& decision, const Eigen::VectorXd& y) {
    double npos = y.sum();
    double nneg = static_cast<double>(y.size()) - npos;
    double a = 0.0;
    double b = std::log((nneg + 1.0) / (npos + 1.0));
    double obj = platt_objective(decision, y, a, b);

    const double sigma = 1e-12;
    for (int iter = 0; iter < 100; ++iter) {
        // Gradient and Hessian of the objective in (a, b)
        Eigen::VectorXd t;
        platt_targets(y, t);
        double g1 = 0.0, g2 = 0.0, h11 = sigma, h22 = sigma, h21 = 0.0;
        for (Eigen::Index i = 0; i < decision.size(); ++i) {
            double fab = a * decision[i] + b;
            double p, q;
            if (fab >= 0) {
                p = std::exp(-fab) / (1.0 + std::exp(-fab));
                q = 1.0 / (1.0 + std::exp(-fab));
            } else {
                p = 1.0 / (1.0 + std::exp(fab));
                q = std::exp(fab) / (1.0 + std::exp(fab));
            }
            double d1 = t[i] - p;
            double d2 = p * q;
            g1 += d1 * decision[i];
            g2 += d1;
            h11 += d2 * decision[i] * decision[i];
            h22 += d2;
            h21 += d2 * decision[i];
        }
        if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;

        double det = h11 * h22 - h21 * h21;
        double da = -(h22 * g1 - h21 * g2) / det;
        double db = -(-h21 * g1 + h11 * g2) / det;
        double gd = g1 * da + g2 * db;

        double step = 1.0;
        bool moved = false;
        while (step >= 1e-10) {
            double na = a + step * da;
            double nb = b + step * db;
            double nobj = platt_objective(decision, y, na, nb);
            if (nobj < obj + 1e-4 * step * gd) {
                a = na;
                b = nb;
                obj = nobj;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return {a, b};
}

namespace {

struct SmoState {
    const Eigen::MatrixXd& k;
    const Eigen::VectorXd& s;
    double c;
    double tol;
    Eigen::VectorXd alpha;
    Eigen::VectorXd f; // sum_j alpha_j s_j K(i,j), decision value minus b
    double b = 0.0;

    double error(Eigen::Index i) const { return f[i] + b - s[i]; }

    bool take_step(Eigen::Index i1, Eigen::Index i2) {
        if (i1 == i2) return false;
        double a1 = alpha[i1], a2 = alpha[i2];
        double s1 = s[i1], s2 = s[i2];
        double e1 = error(i1), e2 = error(i2);
        double l, h;
        if (s1 != s2) {
            l = std::max(0.0, a2 - a1);
            h = std::min(c, c + a2 - a1);
        } else {
            l = std::max(0.0, a1 + a2 - c);
            h = std::min(c, a1 + a2);
        }
        if (l >= h) return false;

        double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
        double eta = k11 + k22 - 2.0 * k12;
        double a2_new;
        if (eta > 0.0) {
            a2_new = a2 + s2 * (e1 - e2) / eta;
            a2_new = std::clamp(a2_new, l, h);
        } else {
            // Flat direction (duplicate rows): the dual is linear in a2 along
            // the constraint, with slope s2*(E1-E2); move to the better end.
            double slope = s2 * (e1 - e2);
            if (slope > 1e-12)
                a2_new = h;
            else if (slope < -1e-12)
                a2_new = l;
            else
                return false;
        }
        if (std::abs(a2_new - a2) < 1e-10 * (a2_new + a2 + 1e-10)) return false;
        double a1_new = a1 + s1 * s2 * (a2 - a2_new);
        if (a1_new < 0.0) a1_new = 0.0;
        if (a1_new > c) a1_new = c;

        double d1 = s1 * (a1_new - a1);
        double d2 = s2 * (a2_new - a2);
        f.noalias() += d1 * k.col(i1) + d2 * k.col(i2);
        alpha[i1] = a1_new;
        alpha[i2] = a2_new;

        bool free1 = a1_new > 0.0 && a1_new < c;
        bool free2 = a2_new > 0.0 && a2_new < c;
        if (free1)
            b = s1 - f[i1];
        else if (free2)
            b = s2 - f[i2];
        else
            b = 0.5 * ((s1 - f[i1]) + (s2 - f[i2]));
        return true;
    }

    bool examine(Eigen::Index i2) {
        double e2 = error(i2);
        double r2 = e2 * s[i2];
        bool violates = (r2 < -tol && alpha[i2] < c) || (r2 > tol && alpha[i2] > 0.0);
        if (!violates) return false;

        // Second choice: largest |E1 - E2| among free multipliers.
        Eigen::Index best = -1;
        double best_gap = -1.0;
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            if (alpha[i] <= 0.0 || alpha[i] >= c) continue;
            double gap = std::abs(error(i) - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best >= 0 && take_step(best, i2)) return true;
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            if (alpha[i] <= 0.0 || alpha[i] >= c) continue;
            if (take_step(i, i2)) return true;
        }
        for (Eigen::Index i = 0; i < alpha.size(); ++i)
            if (take_step(i, i2)) return true;
        return false;
    }
};

} // namespace

SvmRbfFit fit_svm_rbf(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double cost,
                      double gamma, double kkt_tol, int max_passes) {
    if (cost <= 0.0) throw NumericError("svm cost must be > 0");
    if (gamma <= 0.0) throw NumericError("svm gamma must be > 0");
    const Eigen::Index n = z.rows();
    double ybar = y.mean();
    if (ybar <= 0.0 || ybar >= 1.0) throw DegenerateOutcome("outcome is constant");

    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s[i] = 2.0 * y[i] - 1.0;
    Eigen::MatrixXd kernel = rbf_kernel(z, z, gamma);

    SmoState state{kernel, s, cost, kkt_tol, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};

    int passes = 0;
    bool examine_all = true;
    int n_changed = 1;
    bool clean_pass = false;
    while ((n_changed > 0 || examine_all) && passes < max_passes) {
        n_changed = 0;
        if (examine_all) {
            for (Eigen::Index i = 0; i < n; ++i) n_changed += state.examine(i) ? 1 : 0;
        } else {
            for (Eigen::Index i = 0; i < n; ++i)
                if (state.alpha[i] > 0.0 && state.alpha[i] < cost)
                    n_changed += state.examine(i) ? 1 : 0;
        }
        if (examine_all) {
            clean_pass = n_changed == 0;
            examine_all = false;
        } else if (n_changed == 0) {
            examine_all = true;
        }
        ++passes;
    }

    SvmRbfFit fit;
    fit.gamma = gamma;
    fit.b = state.b;
    fit.alpha = state.alpha;
    fit.converged = clean_pass;
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < n; ++i)
        if (state.alpha[i] > 1e-12) support.push_back(i);
    fit.support_z.resize(static_cast<Eigen::Index>(support.size()), z.cols());
    fit.coef.resize(static_cast<Eigen::Index>(support.size()));
    for (std::size_t r = 0; r < support.size(); ++r) {
        fit.support_z.row(static_cast<Eigen::Index>(r)) = z.row(support[r]);
        fit.coef[static_cast<Eigen::Index>(r)] = state.alpha[support[r]] * s[support[r]];
    }

    // Calibrate on the training decision values.
    Eigen::VectorXd decision = state.f.array() + state.b;
    auto [pa, pb] = fit_platt(decision, y);
    fit.platt_a = pa;
    fit.platt_b = pb;
    return fit;
}

double svm_decision(const SvmRbfFit& fit, const Eigen::VectorXd& z_row) {
    double f = fit.b;
    for (Eigen::Index r = 0; r < fit.support_z.rows(); ++r)
        f += fit.coef[r] *
             std::exp(-fit.gamma * (fit.support_z.row(r).transpose() - z_row).squaredNorm());
    return f;
}

double svm_predict_proba(const SvmRbfFit& fit, const Eigen::VectorXd& z_row) {
    double f = svm_decision(fit, z_row);
    double fab = fit.platt_a * f + fit.platt_b;
    if (fab >= 0) {
        double e = std::exp(-fab);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(fab));
}

} // namespace gcml
