#include "causattr/attribution.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "causattr/errors.hpp"

namespace causattr {

namespace {

std::vector<Eigen::VectorXd> stratum_covariates(const MixtureModelParams& params, Evidence ev, const Dataset* data) {
    std::vector<Eigen::VectorXd> xs;
    if (data) {
        if (!data->empty() && data->dim() != params.dim()) {
            throw ContractError("dataset covariate dimension does not match the model");
        }
        for (const auto& r : data->records()) {
            if (ev.empty() || r.evidence() == ev) xs.push_back(Eigen::Map<const Eigen::VectorXd>(r.x.data(), r.x.size()));
        }
    }
    if (xs.empty()) {
        if (params.dim() != 1) {
            throw ContractError("covariate model needs units in stratum " + ev.str() + " to average over");
        }
        xs.push_back(Eigen::VectorXd::Ones(1));
    }
    return xs;
}

// Per-unit log posterior over compatible classes: log pi_g(x) - log sum over compatible.
Eigen::VectorXd unit_log_posterior(const MixtureModelParams& params, Evidence ev, const Eigen::VectorXd& x,
                                   const std::vector<int>& comp) {
    Eigen::VectorXd lp(params.n_classes());
    log_class_prior(params.theta(), x, lp);
    Eigen::VectorXd out(comp.size());
    for (std::size_t j = 0; j < comp.size(); ++j) out(j) = lp(comp[j]);
    double lse = log_sum_exp(out.data(), static_cast<int>(out.size()));
    if (!std::isfinite(lse)) throw ModelError("evidence stratum " + ev.str() + " has zero model probability");
    out.array() -= lse;
    return out;
}

}  // namespace

ClassDistribution model_posterior(const MixtureModelParams& params, Evidence ev, const Dataset* data) {
    auto xs = stratum_covariates(params, ev, data);
    ClassDistribution out;
    if (ev.empty()) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(params.n_classes());
        Eigen::VectorXd lp(params.n_classes());
        for (const auto& x : xs) {
            log_class_prior(params.theta(), x, lp);
            acc += lp.array().exp().matrix();
        }
        acc /= static_cast<double>(xs.size());
        for (int k = 0; k < params.n_classes(); ++k) out.set(params.class_at(k), acc(k));
        return out;
    }
    const auto& comp = params.compatible(ev.index());
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(comp.size());
    for (const auto& x : xs) acc += unit_log_posterior(params, ev, x, comp).array().exp().matrix();
    acc /= acc.sum();
    for (std::size_t j = 0; j < comp.size(); ++j) out.set(params.class_at(comp[j]), acc(j));
    return out;
}

ClassDistribution model_posterior_extended(const MixtureModelParams& params, const ExtendedEvidence& ext,
                                           const Dataset* data) {
    if (ext.ev.empty()) throw ContractError("extended evidence needs a non-empty stratum");
    if (!std::isfinite(ext.w)) throw ContractError("w must be finite");
    auto xs = stratum_covariates(params, ext.ev, data);
    const auto& comp = params.compatible(ext.ev.index());
    const ExposureCell cell = ext.ev.cell();
    const int nc = static_cast<int>(comp.size());
    for (int k : comp) {
        if (!params.component(cell, k).active) {
            throw ContractError("class " + params.class_at(k).str() + " has no fitted density in stratum " +
                                ext.ev.str());
        }
    }
    // log of sum over units of f(w | cell, g, x_i) p_i(g), per class.
    std::vector<std::vector<double>> terms(nc);
    for (const auto& x : xs) {
        Eigen::VectorXd lpost = unit_log_posterior(params, ext.ev, x, comp);
        for (int j = 0; j < nc; ++j) {
            const ComponentParams& cp = params.component(cell, comp[j]);
            terms[j].push_back(lpost(j) + normal_log_density(ext.w, cp.mu.dot(x), cp.sigma2));
        }
    }
    std::vector<double> per_class(nc);
    for (int j = 0; j < nc; ++j) per_class[j] = log_sum_exp(terms[j].data(), static_cast<int>(terms[j].size()));
    double lse = log_sum_exp(per_class.data(), nc);
    if (!std::isfinite(lse)) throw ModelError("total density is zero at w = " + std::to_string(ext.w));
    ClassDistribution out;
    for (int j = 0; j < nc; ++j) out.set(params.class_at(comp[j]), std::exp(per_class[j] - lse));
    return out;
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
    if (steps < 1 || !(hi > lo)) throw InputError("grid needs lo < hi and at least one step");
    std::vector<double> g(steps + 1);
    for (int i = 0; i <= steps; ++i) g[i] = lo + (hi - lo) * i / steps;
    return g;
}

PosteriorCurve posterior_curve(const MixtureModelParams& params, Evidence ev, const std::vector<double>& grid,
                               const Dataset* data) {
    if (grid.empty()) throw ContractError("grid must be nonempty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ContractError("grid must be strictly increasing");
    }
    PosteriorCurve curve;
    curve.ev = ev;
    curve.grid = grid;
    for (int k : params.compatible(ev.index())) curve.classes.push_back(params.class_at(k));
    curve.probability.assign(curve.classes.size(), std::vector<double>(grid.size()));

    auto dominant = [&](const ClassDistribution& p) {
        LatentClass best = curve.classes.front();
        for (LatentClass g : curve.classes) {
            if (p[g] > p[best]) best = g;
        }
        return best;
    };
    auto eval = [&](double w) { return model_posterior_extended(params, {ev, w}, data); };

    LatentClass prev_top;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ClassDistribution p = eval(grid[i]);
        for (std::size_t j = 0; j < curve.classes.size(); ++j) curve.probability[j][i] = p[curve.classes[j]];
        LatentClass top = dominant(p);
        if (i > 0 && top != prev_top) {
            double lo = grid[i - 1], hi = grid[i];
            for (int step = 0; step < 40; ++step) {
                double mid = 0.5 * (lo + hi);
                ClassDistribution q = eval(mid);
                if (q[prev_top] >= q[top]) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            curve.crossings.push_back({0.5 * (lo + hi), prev_top, top});
        }
        prev_top = top;
    }
    return curve;
}

std::vector<std::string> AttributionMatrix::causes() const {
    std::set<std::string> names;
    for (const auto& [g, row] : shares) {
        for (const auto& [cause, s] : row) names.insert(cause);
    }
    return {names.begin(), names.end()};
}

void AttributionMatrix::validate() const {
    for (const auto& [g, row] : shares) {
        double total = 0.0;
        for (const auto& [cause, s] : row) {
            if (cause == kOtherCause) throw InputError("cause label 'other' is reserved for the residual");
            if (!(s >= 0.0 && s <= 1.0)) throw InputError("share for class " + g.str() + " must lie in [0, 1]");
            total += s;
        }
        if (total > 1.0 + 1e-12) throw InputError("shares for class " + g.str() + " exceed 1");
    }
}

AttributionMatrix default_attribution(const std::string& z_cause, const std::string& m_cause) {
    AttributionMatrix a;
    a.shares[LatentClass(0, 0, 0, 0)] = {{z_cause, 0.0}, {m_cause, 0.0}};
    a.shares[LatentClass(0, 0, 0, 1)] = {{z_cause, 0.5}, {m_cause, 0.5}};
    a.shares[LatentClass(0, 0, 1, 1)] = {{z_cause, 1.0}, {m_cause, 0.0}};
    a.shares[LatentClass(0, 1, 0, 1)] = {{z_cause, 0.0}, {m_cause, 1.0}};
    a.shares[LatentClass(0, 1, 1, 1)] = {{z_cause, 0.5}, {m_cause, 0.5}};
    a.shares[LatentClass(1, 1, 1, 1)] = {{z_cause, 0.0}, {m_cause, 0.0}};
    return a;
}

std::map<std::string, double> responsibility_shares(const ClassDistribution& posterior,
                                                    const AttributionMatrix& attribution) {
    attribution.validate();
    std::map<std::string, double> out;
    for (const auto& cause : attribution.causes()) out[cause] = 0.0;
    double assigned = 0.0;
    for (const auto& [g, p] : posterior) {
        auto it = attribution.shares.find(g);
        if (it == attribution.shares.end()) {
            if (p == 0.0) continue;
            throw ContractError("attribution matrix has no row for class " + g.str());
        }
        for (const auto& [cause, s] : it->second) {
            out[cause] += p * s;
            assigned += p * s;
        }
    }
    out[kOtherCause] = posterior.total() - assigned;
    return out;
}

}  // namespace causattr
