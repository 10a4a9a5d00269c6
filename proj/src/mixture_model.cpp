#include "causattr/mixture_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "causattr/errors.hpp"

namespace causattr {

std::string to_string(Restriction r) {
    switch (r) {
        case Restriction::none: return "none";
        case Restriction::shared_means: return "shared-means";
        case Restriction::shared_variances: return "shared-variances";
    }
    return "none";
}

Restriction parse_restriction(const std::string& text) {
    if (text == "none") return Restriction::none;
    if (text == "shared-means") return Restriction::shared_means;
    if (text == "shared-variances") return Restriction::shared_variances;
    throw InputError("restriction must be none, shared-means or shared-variances, got '" + text + "'");
}

MixtureModelParams::MixtureModelParams(bool monotone, Restriction restriction, int dim)
    : monotone_(monotone), restriction_(restriction), dim_(dim), classes_(enumerate_classes(monotone)) {
    if (dim < 1) throw ContractError("covariate dimension must be at least 1");
    theta_ = Eigen::MatrixXd::Zero(n_classes(), dim);
    components_.assign(4 * classes_.size(), ComponentParams{Eigen::VectorXd::Zero(dim), 1.0, false});
    for (Evidence ev : all_evidence()) {
        for (int k = 0; k < n_classes(); ++k) {
            if (outcome_under(classes_[k], ev.cell()) == ev.y()) compatible_[ev.index()].push_back(k);
        }
    }
}

int MixtureModelParams::class_index(LatentClass g) const {
    auto it = std::lower_bound(classes_.begin(), classes_.end(), g);
    return it != classes_.end() && *it == g ? static_cast<int>(it - classes_.begin()) : -1;
}

void MixtureModelParams::validate(double variance_floor) const {
    if (!theta_.row(0).isZero(0.0)) throw ContractError("reference class coefficients must be zero");
    for (int k = 0; k < n_classes(); ++k) {
        for (ExposureCell c : kAllCells) {
            const ComponentParams& cp = component(c, k);
            if (!cp.active) continue;
            if (cp.mu.size() != dim_) throw ContractError("component mean has the wrong dimension");
            if (!(cp.sigma2 > 0.0) || cp.sigma2 < variance_floor) {
                throw ContractError("component variance below the floor");
            }
        }
    }
}

void log_class_prior(const Eigen::MatrixXd& theta, const Eigen::Ref<const Eigen::VectorXd>& x,
                     Eigen::Ref<Eigen::VectorXd> out) {
    out.noalias() = theta * x;
    double mx = out.maxCoeff();
    double s = (out.array() - mx).exp().sum();
    out.array() -= mx + std::log(s);
}

ClassDistribution class_prior(const MixtureModelParams& params, const Eigen::VectorXd& x) {
    if (x.size() != params.dim()) {
        throw ContractError("covariate dimension " + std::to_string(x.size()) + " does not match model dimension " +
                            std::to_string(params.dim()));
    }
    Eigen::VectorXd lp(params.n_classes());
    log_class_prior(params.theta(), x, lp);
    ClassDistribution out;
    for (int k = 0; k < params.n_classes(); ++k) out.set(params.class_at(k), std::exp(lp(k)));
    return out;
}

double normal_log_density(double w, double mean, double sigma2) {
    double r = w - mean;
    return -0.5 * (std::log(2.0 * std::numbers::pi * sigma2) + r * r / sigma2);
}

double component_log_density(const MixtureModelParams& params, ExposureCell cell, LatentClass g,
                             const Eigen::VectorXd& x, double w) {
    int k = params.class_index(g);
    if (k < 0) throw ContractError("class " + g.str() + " is not in the model's class set");
    if (x.size() != params.dim()) throw ContractError("covariate dimension mismatch");
    const ComponentParams& cp = params.component(cell, k);
    return normal_log_density(w, cp.mu.dot(x), cp.sigma2);
}

double component_density(const MixtureModelParams& params, ExposureCell cell, LatentClass g,
                         const Eigen::VectorXd& x, double w) {
    return std::exp(component_log_density(params, cell, g, x, w));
}

double log_sum_exp(const double* v, int n) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) mx = std::max(mx, v[i]);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::exp(v[i] - mx);
    return mx + std::log(s);
}

}  // namespace causattr
