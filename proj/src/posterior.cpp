#include "causattr/posterior.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "causattr/errors.hpp"
#include "causattr/mixture_model.hpp"

namespace causattr {

namespace {

ClassDistribution restrict_and_normalize(const ClassDistribution& pi, Evidence ev) {
    ClassDistribution out;
    double mass = 0.0;
    for (const auto& [g, p] : pi) {
        if (outcome_under(g, ev.cell()) == ev.y()) {
            out.set(g, p);
            mass += p;
        }
    }
    if (!(mass > 0.0)) {
        throw InfeasibleError("evidence stratum " + ev.str() + " has probability zero; posterior undefined");
    }
    for (const auto& [g, p] : out.probs()) out.set(g, p / mass);
    return out;
}

}  // namespace

CellRates implied_rates(const ClassDistribution& pi) {
    CellRates d;
    for (ExposureCell c : kAllCells) {
        double s = 0.0;
        for (const auto& [g, p] : pi) s += outcome_under(g, c) ? p : 0.0;
        d[c] = s;
    }
    return d;
}

ClassDistribution posterior_given_evidence(const ClassDistribution& pi, const CellRates& d, Evidence ev,
                                           double consistency_tol) {
    if (ev.empty()) return pi;
    CellRates implied = implied_rates(pi);
    for (ExposureCell c : kAllCells) {
        if (std::abs(implied[c] - d[c]) > consistency_tol) {
            throw ContractError("class distribution implies rate " + std::to_string(implied[c]) + " in cell (" +
                                std::to_string(c.z) + "," + std::to_string(c.m) + ") but the supplied rate is " +
                                std::to_string(d[c]));
        }
    }
    if (!(d.evidence_mass(ev) > 0.0)) {
        throw InfeasibleError("evidence stratum " + ev.str() + " has probability zero; posterior undefined");
    }
    // The compatible mass equals the stratum probability within the tolerance;
    // normalizing by it keeps the result an exact distribution.
    return restrict_and_normalize(pi, ev);
}

ClassDistribution posterior_given_evidence(const ClassDistribution& pi, Evidence ev) {
    if (ev.empty()) return pi;
    return restrict_and_normalize(pi, ev);
}

ClassDistribution posterior_given_extended(const ClassDistribution& evidence_posterior,
                                           const std::map<LatentClass, double>& log_densities) {
    std::vector<LatentClass> classes;
    std::vector<double> logs;
    for (const auto& [g, p] : evidence_posterior) {
        auto it = log_densities.find(g);
        if (it == log_densities.end()) throw ContractError("no density supplied for class " + g.str());
        classes.push_back(g);
        logs.push_back(p > 0.0 ? std::log(p) + it->second : -std::numeric_limits<double>::infinity());
    }
    double lse = log_sum_exp(logs.data(), static_cast<int>(logs.size()));
    if (!std::isfinite(lse)) throw ModelError("total density is zero at the supplied w");
    ClassDistribution out;
    for (std::size_t j = 0; j < classes.size(); ++j) out.set(classes[j], std::exp(logs[j] - lse));
    return out;
}

}  // namespace causattr
