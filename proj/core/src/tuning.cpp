#include "gcml/tuning.hpp"

#include <algorithm>
#include <cmath>

#include "gcml/elasticnet.hpp"
#include "gcml/errors.hpp"
#include "gcml/logistic.hpp"
#include "gcml/neural_net.hpp"
#include "gcml/rng.hpp"
#include "gcml/super_learner.hpp"
#include "gcml/svm.hpp"

namespace gcml {

FoldPlan make_folds(Eigen::Index n, int k, const Eigen::VectorXd& y, std::uint64_t seed) {
    if (k < 2 || static_cast<Eigen::Index>(k) > n)
        throw NumericError("fold count must be between 2 and n");

    std::vector<Eigen::Index> events, nonevents;
    for (Eigen::Index i = 0; i < n; ++i) (y[i] == 1.0 ? events : nonevents).push_back(i);

    RngStream rng(seed);
    auto shuffle = [&](std::vector<Eigen::Index>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    };
    shuffle(events);
    shuffle(nonevents);

    FoldPlan plan;
    plan.k = k;
    plan.fold_of.assign(static_cast<std::size_t>(n), 0);
    plan.low_events = static_cast<int>(events.size()) < k;
    int ptr = 0;
    for (Eigen::Index idx : events) {
        plan.fold_of[static_cast<std::size_t>(idx)] = ptr;
        ptr = (ptr + 1) % k;
    }
    for (Eigen::Index idx : nonevents) {
        plan.fold_of[static_cast<std::size_t>(idx)] = ptr;
        ptr = (ptr + 1) % k;
    }
    return plan;
}

double compute_auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
    const Eigen::Index n = scores.size();
    double n1 = labels.sum();
    double n0 = static_cast<double>(n) - n1;
    if (n1 == 0.0 || n0 == 0.0) throw NumericError("AUC undefined for single-class labels");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t t = i; t < j; ++t)
            if (labels[order[t]] == 1.0) rank_sum_pos += avg_rank;
        i = j;
    }
    return (rank_sum_pos - n1 * (n1 + 1.0) / 2.0) / (n1 * n0);
}

namespace {

struct CvSplit {
    std::vector<std::vector<Eigen::Index>> train, test;
};

CvSplit split_from_plan(const FoldPlan& plan) {
    CvSplit s;
    s.train.resize(static_cast<std::size_t>(plan.k));
    s.test.resize(static_cast<std::size_t>(plan.k));
    for (std::size_t i = 0; i < plan.fold_of.size(); ++i) {
        for (int f = 0; f < plan.k; ++f) {
            if (plan.fold_of[i] == f)
                s.test[static_cast<std::size_t>(f)].push_back(static_cast<Eigen::Index>(i));
            else
                s.train[static_cast<std::size_t>(f)].push_back(static_cast<Eigen::Index>(i));
        }
    }
    return s;
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& z, const std::vector<Eigen::Index>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), z.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = z.row(idx[i]);
    return out;
}

Eigen::VectorXd elems_of(const Eigen::VectorXd& y, const std::vector<Eigen::Index>& idx) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = y[idx[i]];
    return out;
}

// AUC of held-out scores; single-class holdouts count as failures upstream.
double safe_auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels, bool& failed) {
    try {
        return compute_auc(scores, labels);
    } catch (const Error&) {
        failed = true;
        return 0.5;
    }
}

// Single-candidate fit + held-out prediction for learners without a path
// structure. Throws on degenerate fits; the caller translates that into the
// fold-failure policy.
Eigen::VectorXd cv_fit_predict(LearnerKind kind, const Eigen::MatrixXd& ztr,
                               const Eigen::VectorXd& ytr, const Eigen::MatrixXd& zte,
                               const TunedParams& p, std::uint64_t seed) {
    const Eigen::Index m = zte.rows();
    Eigen::VectorXd scores(m);
    switch (kind) {
        case LearnerKind::unadjusted:
        case LearnerKind::logistic: {
            LogisticFit fit = fit_logistic_irls(ztr, ytr);
            Eigen::VectorXd beta = fit.beta.tail(fit.beta.size() - 1);
            for (Eigen::Index i = 0; i < m; ++i)
                scores[i] = sigmoid(fit.beta[0] + beta.dot(zte.row(i)));
            return scores;
        }
        case LearnerKind::lasso:
        case LearnerKind::elasticnet: {
            ElasticnetSpec spec{p.alpha, p.lambda};
            ElasticnetFit fit = fit_elasticnet_cd(ztr, ytr, spec);
            for (Eigen::Index i = 0; i < m; ++i)
                scores[i] = sigmoid(fit.b0 + fit.beta.dot(zte.row(i)));
            return scores;
        }
        case LearnerKind::neuralnet: {
            NeuralNetFit fit = fit_neural_net(ztr, ytr, p.hidden_size, p.decay, seed);
            for (Eigen::Index i = 0; i < m; ++i) scores[i] = nn_predict(fit, zte.row(i));
            return scores;
        }
        case LearnerKind::svm_rbf: {
            SvmRbfFit fit = fit_svm_rbf(ztr, ytr, p.cost, p.gamma);
            for (Eigen::Index i = 0; i < m; ++i) scores[i] = svm_predict_proba(fit, zte.row(i));
            return scores;
        }
        default: throw NumericError("cv_fit_predict: unsupported learner");
    }
}

// Tie-break comparator: strictly better AUC wins; equal AUC prefers the more
// regularized candidate (larger lambda, smaller hidden size, smaller cost).
// Candidates arrive in grid order, so remaining ties keep the lowest index.
bool prefer(LearnerKind kind, double auc, const TunedParams& cand, double best_auc,
            const TunedParams& best) {
    if (auc > best_auc) return true;
    if (auc < best_auc) return false;
    switch (kind) {
        case LearnerKind::lasso:
        case LearnerKind::elasticnet: return cand.lambda > best.lambda;
        case LearnerKind::neuralnet: return cand.hidden_size < best.hidden_size;
        case LearnerKind::svm_rbf: return cand.cost < best.cost;
        default: return false;
    }
}

TuneResult tune_trivial(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LearnerKind kind,
                        const CvSplit& split, const FoldPlan& plan) {
    TuneResult result;
    double total = 0.0;
    for (int f = 0; f < plan.k; ++f) {
        const auto& tr = split.train[static_cast<std::size_t>(f)];
        const auto& te = split.test[static_cast<std::size_t>(f)];
        bool failed = false;
        double auc = 0.5;
        try {
            Eigen::VectorXd scores =
                cv_fit_predict(kind, rows_of(z, tr), elems_of(y, tr), rows_of(z, te), {}, 0);
            auc = safe_auc(scores, elems_of(y, te), failed);
        } catch (const Error&) {
            failed = true;
        }
        if (failed) ++result.n_fold_failures;
        total += auc;
    }
    result.cv_auc = total / static_cast<double>(plan.k);
    result.table.push_back({result.params, result.cv_auc});
    return result;
}

TuneResult tune_enet(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LearnerKind kind,
                     const LearnerSettings& settings, const CvSplit& split, const FoldPlan& plan) {
    std::vector<double> alphas;
    if (kind == LearnerKind::lasso)
        alphas = {1.0};
    else
        for (int i = 1; i <= 10; ++i) alphas.push_back(static_cast<double>(i) / 10.0);

    TuneResult result;
    double best_auc = -1.0;
    for (double alpha : alphas) {
        double lmax = elasticnet_lambda_max(z, y, alpha);
        std::vector<double> lambdas;
        if (lmax > 0.0)
            lambdas = lambda_grid(lmax, settings.grid_length, settings.lambda_min_ratio);
        else
            lambdas = {0.0};

        // Warm-started path per fold: fit from the largest lambda down and
        // score every held-out row at each step.
        const std::size_t nl = lambdas.size();
        std::vector<double> auc_sum(nl, 0.0);
        std::vector<int> fold_failures(nl, 0);
        for (int f = 0; f < plan.k; ++f) {
            const auto& tr = split.train[static_cast<std::size_t>(f)];
            const auto& te = split.test[static_cast<std::size_t>(f)];
            Eigen::MatrixXd ztr = rows_of(z, tr);
            Eigen::VectorXd ytr = elems_of(y, tr);
            Eigen::MatrixXd zte = rows_of(z, te);
            Eigen::VectorXd yte = elems_of(y, te);
            try {
                ElasticnetFit warm;
                bool have_warm = false;
                for (std::size_t li = 0; li < nl; ++li) {
                    ElasticnetSpec spec{alpha, lambdas[li]};
                    ElasticnetFit fit =
                        fit_elasticnet_cd(ztr, ytr, spec, have_warm ? &warm : nullptr, 1e-7,
                                          settings.enet_max_sweeps);
                    Eigen::VectorXd scores(zte.rows());
                    for (Eigen::Index i = 0; i < zte.rows(); ++i)
                        scores[i] = sigmoid(fit.b0 + fit.beta.dot(zte.row(i)));
                    bool failed = false;
                    double auc = safe_auc(scores, yte, failed);
                    if (failed) ++fold_failures[li];
                    auc_sum[li] += auc;
                    warm = std::move(fit);
                    have_warm = true;
                }
            } catch (const Error&) {
                for (std::size_t li = 0; li < nl; ++li) {
                    auc_sum[li] += 0.5;
                    ++fold_failures[li];
                }
            }
        }
        for (std::size_t li = 0; li < nl; ++li) {
            TunedParams cand;
            cand.alpha = alpha;
            cand.lambda = lambdas[li];
            double mean_auc = auc_sum[li] / static_cast<double>(plan.k);
            result.table.push_back({cand, mean_auc});
            result.n_fold_failures += fold_failures[li];
            if (prefer(kind, mean_auc, cand, best_auc, result.params)) {
                best_auc = mean_auc;
                result.params = cand;
                result.cv_auc = mean_auc;
            }
        }
    }
    return result;
}

TuneResult tune_nn(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                   const LearnerSettings& settings, const CvSplit& split, const FoldPlan& plan,
                   std::uint64_t seed) {
    TuneResult result;
    double best_auc = -1.0;
    for (int hidden = 1; hidden <= settings.grid_length; ++hidden) {
        TunedParams cand;
        cand.hidden_size = hidden;
        cand.decay = settings.nn_decay;
        double total = 0.0;
        for (int f = 0; f < plan.k; ++f) {
            const auto& tr = split.train[static_cast<std::size_t>(f)];
            const auto& te = split.test[static_cast<std::size_t>(f)];
            bool failed = false;
            double auc = 0.5;
            try {
                Eigen::VectorXd scores = cv_fit_predict(
                    LearnerKind::neuralnet, rows_of(z, tr), elems_of(y, tr), rows_of(z, te), cand,
                    derive_seed(seed, "nncv", static_cast<std::uint64_t>(hidden),
                                static_cast<std::uint64_t>(f)));
                auc = safe_auc(scores, elems_of(y, te), failed);
            } catch (const Error&) {
                failed = true;
            }
            if (failed) ++result.n_fold_failures;
            total += auc;
        }
        double mean_auc = total / static_cast<double>(plan.k);
        result.table.push_back({cand, mean_auc});
        if (prefer(LearnerKind::neuralnet, mean_auc, cand, best_auc, result.params)) {
            best_auc = mean_auc;
            result.params = cand;
            result.cv_auc = mean_auc;
        }
    }
    return result;
}

TuneResult tune_svm(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                    const LearnerSettings& settings, const CvSplit& split, const FoldPlan& plan) {
    TuneResult result;
    double gamma = median_pairwise_gamma(z);
    double best_auc = -1.0;
    for (int i = 0; i < settings.grid_length; ++i) {
        TunedParams cand;
        cand.cost = std::pow(2.0, -5 + i);
        cand.gamma = gamma;
        double total = 0.0;
        for (int f = 0; f < plan.k; ++f) {
            const auto& tr = split.train[static_cast<std::size_t>(f)];
            const auto& te = split.test[static_cast<std::size_t>(f)];
            bool failed = false;
            double auc = 0.5;
            try {
                Eigen::VectorXd scores = cv_fit_predict(LearnerKind::svm_rbf, rows_of(z, tr),
                                                        elems_of(y, tr), rows_of(z, te), cand, 0);
                auc = safe_auc(scores, elems_of(y, te), failed);
            } catch (const Error&) {
                failed = true;
            }
            if (failed) ++result.n_fold_failures;
            total += auc;
        }
        double mean_auc = total / static_cast<double>(plan.k);
        result.table.push_back({cand, mean_auc});
        if (prefer(LearnerKind::svm_rbf, mean_auc, cand, best_auc, result.params)) {
            best_auc = mean_auc;
            result.params = cand;
            result.cv_auc = mean_auc;
        }
    }
    return result;
}

TuneResult tune_sl(const TrialDataset& data, const LearnerSettings& settings, std::uint64_t seed,
                   const FoldPlan& plan, const CvSplit& split,
                   const std::vector<TunedParams>* pre_tuned) {
    const auto& bases = settings.sl_bases;
    if (bases.size() < 2) throw NumericError("super learner needs at least 2 base learners");
    if (pre_tuned && pre_tuned->size() != bases.size())
        throw NumericError("pre-tuned base parameter count does not match sl_bases");

    TuneResult result;
    result.params.sl_kinds = bases;
    result.params.sl_params.resize(bases.size());

    if (pre_tuned) {
        result.params.sl_params = *pre_tuned;
    } else {
        // Tune every base on the full data with its own derived stream.
        for (std::size_t k = 0; k < bases.size(); ++k) {
            TuneResult base =
                tune_learner(data, bases[k], settings, derive_seed(seed, "slbase", k));
            result.params.sl_params[k] = base.params;
            result.n_fold_failures += base.n_fold_failures;
        }
    }

    // Out-of-fold prediction matrix, one column per base.
    const Eigen::Index n = data.n();
    Eigen::MatrixXd p = Eigen::MatrixXd::Constant(n, static_cast<Eigen::Index>(bases.size()), 0.5);
    std::vector<bool> base_ok(bases.size(), true);
    for (std::size_t k = 0; k < bases.size(); ++k) {
        DesignMatrix design = build_design(data, design_for(bases[k], settings));
        for (int f = 0; f < plan.k; ++f) {
            const auto& tr = split.train[static_cast<std::size_t>(f)];
            const auto& te = split.test[static_cast<std::size_t>(f)];
            try {
                Eigen::VectorXd scores = cv_fit_predict(
                    bases[k], rows_of(design.z, tr), elems_of(data.y, tr), rows_of(design.z, te),
                    result.params.sl_params[k],
                    derive_seed(seed, "sloof", k, static_cast<std::uint64_t>(f)));
                for (std::size_t i = 0; i < te.size(); ++i)
                    p(te[i], static_cast<Eigen::Index>(k)) = scores[static_cast<Eigen::Index>(i)];
            } catch (const Error&) {
                base_ok[k] = false;
            }
        }
        if (!base_ok[k])
            result.warnings.push_back("super learner base " + to_string(bases[k]) +
                                      " failed during cross-validation; weight forced to 0");
    }

    std::vector<Eigen::Index> keep;
    for (std::size_t k = 0; k < bases.size(); ++k)
        if (base_ok[k]) keep.push_back(static_cast<Eigen::Index>(k));
    if (keep.empty()) throw NumericError("every super learner base failed cross-validation");

    Eigen::MatrixXd p_keep(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
        p_keep.col(static_cast<Eigen::Index>(k)) = p.col(keep[k]);

    SlWeightResult opt =
        optimize_sl_weights(p_keep, data.y, plan.fold_of, plan.k, derive_seed(seed, "slw"));

    result.params.sl_weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bases.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
        result.params.sl_weights[keep[k]] = opt.w[static_cast<Eigen::Index>(k)];
    result.cv_auc = opt.cv_auc;
    result.table.push_back({result.params, result.cv_auc});
    return result;
}

} // namespace

TuneResult tune_learner(const TrialDataset& data, LearnerKind kind,
                        const LearnerSettings& settings, std::uint64_t seed) {
    int k = settings.cv_folds;
    if (static_cast<Eigen::Index>(k) > data.n()) k = static_cast<int>(data.n());
    FoldPlan plan = make_folds(data.n(), k, data.y, derive_seed(seed, "folds"));
    CvSplit split = split_from_plan(plan);

    if (kind == LearnerKind::superlearner)
        return tune_sl(data, settings, seed, plan, split, nullptr);

    DesignMatrix design = build_design(data, design_for(kind, settings));
    switch (kind) {
        case LearnerKind::unadjusted:
        case LearnerKind::logistic: return tune_trivial(design.z, data.y, kind, split, plan);
        case LearnerKind::lasso:
        case LearnerKind::elasticnet:
            return tune_enet(design.z, data.y, kind, settings, split, plan);
        case LearnerKind::neuralnet: return tune_nn(design.z, data.y, settings, split, plan, seed);
        case LearnerKind::svm_rbf: return tune_svm(design.z, data.y, settings, split, plan);
        default: throw NumericError("unknown learner kind");
    }
}

TuneResult tune_super_learner_with(const TrialDataset& data, const LearnerSettings& settings,
                                   std::uint64_t seed, const std::vector<TunedParams>& base_params) {
    int k = settings.cv_folds;
    if (static_cast<Eigen::Index>(k) > data.n()) k = static_cast<int>(data.n());
    FoldPlan plan = make_folds(data.n(), k, data.y, derive_seed(seed, "folds"));
    CvSplit split = split_from_plan(plan);
    return tune_sl(data, settings, seed, plan, split, &base_params);
}

} // namespace gcml
