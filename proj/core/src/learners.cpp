#include "gcml/learners.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "gcml/elasticnet.hpp"
#include "gcml/errors.hpp"
#include "gcml/logistic.hpp"
#include "gcml/neural_net.hpp"
#include "gcml/rng.hpp"
#include "gcml/svm.hpp"

namespace gcml {

std::string to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::unadjusted: return "unadjusted";
        case LearnerKind::logistic: return "logistic";
        case LearnerKind::lasso: return "lasso";
        case LearnerKind::elasticnet: return "elasticnet";
        case LearnerKind::neuralnet: return "neuralnet";
        case LearnerKind::svm_rbf: return "svm";
        case LearnerKind::superlearner: return "superlearner";
    }
    return "unknown";
}

std::optional<LearnerKind> learner_kind_from_string(const std::string& name) {
    if (name == "unadjusted") return LearnerKind::unadjusted;
    if (name == "logistic") return LearnerKind::logistic;
    if (name == "lasso") return LearnerKind::lasso;
    if (name == "elasticnet") return LearnerKind::elasticnet;
    if (name == "neuralnet" || name == "nn") return LearnerKind::neuralnet;
    if (name == "svm" || name == "svm_rbf") return LearnerKind::svm_rbf;
    if (name == "superlearner" || name == "sl") return LearnerKind::superlearner;
    return std::nullopt;
}

namespace {

nlohmann::json params_json(LearnerKind kind, const TunedParams& p) {
    nlohmann::json j;
    j["learner"] = to_string(kind);
    switch (kind) {
        case LearnerKind::unadjusted:
        case LearnerKind::logistic: break;
        case LearnerKind::lasso:
        case LearnerKind::elasticnet:
            j["lambda"] = p.lambda;
            j["alpha"] = p.alpha;
            break;
        case LearnerKind::neuralnet:
            j["hidden_size"] = p.hidden_size;
            j["decay"] = p.decay;
            break;
        case LearnerKind::svm_rbf:
            j["cost"] = p.cost;
            j["gamma"] = p.gamma;
            break;
        case LearnerKind::superlearner: {
            nlohmann::json bases = nlohmann::json::array();
            for (std::size_t k = 0; k < p.sl_kinds.size(); ++k) {
                nlohmann::json base = params_json(p.sl_kinds[k], p.sl_params[k]);
                base["weight"] = p.sl_weights[static_cast<Eigen::Index>(k)];
                bases.push_back(std::move(base));
            }
            j["bases"] = std::move(bases);
            break;
        }
    }
    return j;
}

} // namespace

std::string tuned_params_to_json(LearnerKind kind, const TunedParams& params) {
    return params_json(kind, params).dump();
}

DesignConfig design_for(LearnerKind kind, const LearnerSettings& settings) {
    switch (kind) {
        case LearnerKind::unadjusted: {
            DesignConfig c;
            c.use_splines = false;
            c.use_treatment_interactions = false;
            c.standardize = false;
            c.arm_only = true;
            return c;
        }
        case LearnerKind::logistic: {
            DesignConfig c;
            c.use_splines = false;
            c.use_treatment_interactions = false;
            c.standardize = false;
            return c;
        }
        case LearnerKind::lasso:
        case LearnerKind::elasticnet: return settings.penalized_design;
        case LearnerKind::neuralnet:
        case LearnerKind::svm_rbf:
        case LearnerKind::superlearner: return settings.smooth_design;
    }
    return settings.smooth_design;
}

double OutcomeModel::predict_proba(double a_forced, const Eigen::VectorXd& x_row) const {
    double p = raw_predict(a_forced, x_row);
    return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

namespace {

class LinearLogitModel final : public OutcomeModel {
public:
    LinearLogitModel(LearnerKind kind, DesignTransform tf, double b0, Eigen::VectorXd beta,
                     bool warn)
        : kind_(kind), tf_(std::move(tf)), b0_(b0), beta_(std::move(beta)) {
        warned_ = warn;
    }

    LearnerKind kind() const override { return kind_; }

    std::string payload_json() const override {
        nlohmann::json j;
        j["learner"] = to_string(kind_);
        j["intercept"] = b0_;
        j["coefficients"] = std::vector<double>(beta_.data(), beta_.data() + beta_.size());
        return j.dump();
    }

protected:
    double raw_predict(double a_forced, const Eigen::VectorXd& x_row) const override {
        Eigen::VectorXd z = apply_transform(tf_, a_forced, x_row);
        return sigmoid(b0_ + beta_.dot(z));
    }

private:
    LearnerKind kind_;
    DesignTransform tf_;
    double b0_;
    Eigen::VectorXd beta_;
};

class NeuralNetModel final : public OutcomeModel {
public:
    NeuralNetModel(DesignTransform tf, NeuralNetFit net) : tf_(std::move(tf)), net_(std::move(net)) {
        warned_ = !net_.converged;
    }

    LearnerKind kind() const override { return LearnerKind::neuralnet; }

    std::string payload_json() const override {
        nlohmann::json j;
        j["learner"] = "neuralnet";
        j["hidden_size"] = net_.w1.rows();
        Eigen::VectorXd theta = nn_pack(net_);
        j["weights"] = std::vector<double>(theta.data(), theta.data() + theta.size());
        return j.dump();
    }

protected:
    double raw_predict(double a_forced, const Eigen::VectorXd& x_row) const override {
        return nn_predict(net_, apply_transform(tf_, a_forced, x_row));
    }

private:
    DesignTransform tf_;
    NeuralNetFit net_;
};

class SvmModel final : public OutcomeModel {
public:
    SvmModel(DesignTransform tf, SvmRbfFit svm) : tf_(std::move(tf)), svm_(std::move(svm)) {
        warned_ = !svm_.converged;
    }

    LearnerKind kind() const override { return LearnerKind::svm_rbf; }

    std::string payload_json() const override {
        nlohmann::json j;
        j["learner"] = "svm";
        j["gamma"] = svm_.gamma;
        j["bias"] = svm_.b;
        j["platt"] = {svm_.platt_a, svm_.platt_b};
        j["n_support"] = svm_.support_z.rows();
        return j.dump();
    }

protected:
    double raw_predict(double a_forced, const Eigen::VectorXd& x_row) const override {
        return svm_predict_proba(svm_, apply_transform(tf_, a_forced, x_row));
    }

private:
    DesignTransform tf_;
    SvmRbfFit svm_;
};

class SuperLearnerModel final : public OutcomeModel {
public:
    SuperLearnerModel(std::vector<std::unique_ptr<OutcomeModel>> bases, Eigen::VectorXd weights,
                      bool warn)
        : bases_(std::move(bases)), weights_(std::move(weights)) {
        warned_ = warn;
    }

    LearnerKind kind() const override { return LearnerKind::superlearner; }

    std::string payload_json() const override {
        nlohmann::json j;
        j["learner"] = "superlearner";
        nlohmann::json bases = nlohmann::json::array();
        for (std::size_t k = 0; k < bases_.size(); ++k) {
            if (bases_[k])
                bases.push_back(nlohmann::json::parse(bases_[k]->payload_json()));
            else
                bases.push_back(nullptr);
        }
        j["bases"] = std::move(bases);
        j["weights"] =
            std::vector<double>(weights_.data(), weights_.data() + weights_.size());
        return j.dump();
    }

protected:
    double raw_predict(double a_forced, const Eigen::VectorXd& x_row) const override {
        double p = 0.0;
        for (std::size_t k = 0; k < bases_.size(); ++k) {
            double w = weights_[static_cast<Eigen::Index>(k)];
            if (w == 0.0 || !bases_[k]) continue;
            p += w * bases_[k]->predict_proba(a_forced, x_row);
        }
        return p;
    }

private:
    std::vector<std::unique_ptr<OutcomeModel>> bases_;
    Eigen::VectorXd weights_;
};

} // namespace

std::unique_ptr<OutcomeModel> fit_model(const TrialDataset& data, LearnerKind kind,
                                        const LearnerSettings& settings, const TunedParams& params,
                                        std::uint64_t seed) {
    if (kind == LearnerKind::superlearner) {
        if (params.sl_kinds.empty() || params.sl_weights.size() !=
                                           static_cast<Eigen::Index>(params.sl_kinds.size()))
            throw NumericError("super learner parameters missing base weights");
        std::vector<std::unique_ptr<OutcomeModel>> bases(params.sl_kinds.size());
        bool warn = false;
        for (std::size_t k = 0; k < params.sl_kinds.size(); ++k) {
            if (params.sl_weights[static_cast<Eigen::Index>(k)] == 0.0) continue;
            bases[k] = fit_model(data, params.sl_kinds[k], settings, params.sl_params[k],
                                 derive_seed(seed, "slbase", k));
            warn = warn || bases[k]->warned();
        }
        return std::make_unique<SuperLearnerModel>(std::move(bases), params.sl_weights, warn);
    }

    DesignMatrix design = build_design(data, design_for(kind, settings));
    switch (kind) {
        case LearnerKind::unadjusted:
        case LearnerKind::logistic: {
            LogisticFit fit = fit_logistic_irls(design.z, data.y);
            return std::make_unique<LinearLogitModel>(
                kind, std::move(design.transform), fit.beta[0], fit.beta.tail(fit.beta.size() - 1),
                fit.separation || !fit.converged);
        }
        case LearnerKind::lasso:
        case LearnerKind::elasticnet: {
            ElasticnetSpec spec{params.alpha, params.lambda};
            ElasticnetFit fit =
                fit_elasticnet_cd(design.z, data.y, spec, nullptr, 1e-7, settings.enet_max_sweeps);
            return std::make_unique<LinearLogitModel>(kind, std::move(design.transform), fit.b0,
                                                      std::move(fit.beta), !fit.converged);
        }
        case LearnerKind::neuralnet: {
            NeuralNetFit fit = fit_neural_net(design.z, data.y, params.hidden_size, params.decay,
                                              derive_seed(seed, "nn"));
            return std::make_unique<NeuralNetModel>(std::move(design.transform), std::move(fit));
        }
        case LearnerKind::svm_rbf: {
            SvmRbfFit fit = fit_svm_rbf(design.z, data.y, params.cost, params.gamma);
            return std::make_unique<SvmModel>(std::move(design.transform), std::move(fit));
        }
        default: break;
    }
    throw NumericError("unknown learner kind");
}

} // namespace gcml
