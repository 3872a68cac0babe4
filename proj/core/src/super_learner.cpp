#include "gcml/super_learner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gcml/errors.hpp"
#include "gcml/rng.hpp"
#include "gcml/tuning.hpp"

namespace gcml {

double sl_cv_auc(const Eigen::MatrixXd& p, const Eigen::VectorXd& y,
                 const std::vector<int>& fold_of, int k_folds, const Eigen::VectorXd& w) {
    Eigen::VectorXd blended = p * w;
    double total = 0.0;
    for (int f = 0; f < k_folds; ++f) {
        std::vector<double> s, l;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (fold_of[static_cast<std::size_t>(i)] != f) continue;
            s.push_back(blended[i]);
            l.push_back(y[i]);
        }
        double auc = 0.5;
        bool has0 = std::find(l.begin(), l.end(), 0.0) != l.end();
        bool has1 = std::find(l.begin(), l.end(), 1.0) != l.end();
        if (has0 && has1) {
            Eigen::Map<Eigen::VectorXd> sv(s.data(), static_cast<Eigen::Index>(s.size()));
            Eigen::Map<Eigen::VectorXd> lv(l.data(), static_cast<Eigen::Index>(l.size()));
            auc = compute_auc(sv, lv);
        }
        total += auc;
    }
    return total / static_cast<double>(k_folds);
}

namespace {

Eigen::VectorXd softmax_weights(const Eigen::VectorXd& t) {
    // First coordinate pinned at 0 for identifiability.
    Eigen::VectorXd logits(t.size() + 1);
    logits[0] = 0.0;
    logits.tail(t.size()) = t;
    double m = logits.maxCoeff();
    Eigen::VectorXd w = (logits.array() - m).exp();
    return w / w.sum();
}

// Standard Nelder-Mead minimization, deterministic for a fixed start simplex.
Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& fn,
                            const Eigen::VectorXd& start, double scale, int max_iter) {
    const Eigen::Index d = start.size();
    std::vector<Eigen::VectorXd> x(static_cast<std::size_t>(d + 1), start);
    std::vector<double> f(static_cast<std::size_t>(d + 1));
    for (Eigen::Index i = 0; i < d; ++i) x[static_cast<std::size_t>(i + 1)][i] += scale;
    for (std::size_t i = 0; i < x.size(); ++i) f[i] = fn(x[i]);

    std::vector<std::size_t> order(x.size());
    for (int iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        if (f[order.back()] - f[order.front()] < 1e-10) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += x[order[i]];
        centroid /= static_cast<double>(d);
        std::size_t worst = order.back();

        Eigen::VectorXd refl = centroid + (centroid - x[worst]);
        double f_refl = fn(refl);
        if (f_refl < f[order.front()]) {
            Eigen::VectorXd exp_pt = centroid + 2.0 * (centroid - x[worst]);
            double f_exp = fn(exp_pt);
            if (f_exp < f_refl) {
                x[worst] = exp_pt;
                f[worst] = f_exp;
            } else {
                x[worst] = refl;
                f[worst] = f_refl;
            }
        } else if (f_refl < f[order[order.size() - 2]]) {
            x[worst] = refl;
            f[worst] = f_refl;
        } else {
            Eigen::VectorXd contr = centroid + 0.5 * (x[worst] - centroid);
            double f_contr = fn(contr);
            if (f_contr < f[worst]) {
                x[worst] = contr;
                f[worst] = f_contr;
            } else {
                for (std::size_t i = 1; i < order.size(); ++i) {
                    x[order[i]] = x[order[0]] + 0.5 * (x[order[i]] - x[order[0]]);
                    f[order[i]] = fn(x[order[i]]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < f.size(); ++i)
        if (f[i] < f[best]) best = i;
    return x[best];
}

} // namespace

SlWeightResult optimize_sl_weights(const Eigen::MatrixXd& p, const Eigen::VectorXd& y,
                                   const std::vector<int>& fold_of, int k_folds,
                                   std::uint64_t seed) {
    const Eigen::Index k = p.cols();
    if (k < 1) throw NumericError("super learner needs at least one base column");

    SlWeightResult best;
    best.cv_auc = -1.0;
    auto consider = [&](const Eigen::VectorXd& w) {
        double auc = sl_cv_auc(p, y, fold_of, k_folds, w);
        if (auc > best.cv_auc) {
            best.cv_auc = auc;
            best.w = w;
        }
    };

    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
        w[j] = 1.0;
        consider(w);
    }
    consider(Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k)));

    if (k == 2) {
        for (int i = 0; i <= 100; ++i) {
            double t = static_cast<double>(i) / 100.0;
            Eigen::VectorXd w(2);
            w << t, 1.0 - t;
            consider(w);
        }
    } else if (k == 3) {
        for (int i = 0; i <= 50; ++i)
            for (int j = 0; i + j <= 50; ++j) {
                double t0 = static_cast<double>(i) / 50.0;
                double t1 = static_cast<double>(j) / 50.0;
                Eigen::VectorXd w(3);
                w << t0, t1, 1.0 - t0 - t1;
                consider(w);
            }
    } else if (k >= 4) {
        auto objective = [&](const Eigen::VectorXd& t) {
            return -sl_cv_auc(p, y, fold_of, k_folds, softmax_weights(t));
        };
        RngStream rng(seed);
        for (int restart = 0; restart < 5; ++restart) {
            Eigen::VectorXd t0 = Eigen::VectorXd::Zero(k - 1);
            if (restart > 0)
                for (Eigen::Index i = 0; i < t0.size(); ++i) t0[i] = 2.0 * rng.uniform01() - 1.0;
            Eigen::VectorXd t = nelder_mead(objective, t0, 0.5, 200 * static_cast<int>(k - 1));
            consider(softmax_weights(t));
        }
    }
    return best;
}

} // namespace gcml
