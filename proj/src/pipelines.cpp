#include "causattr/pipelines.hpp"

#include "causattr/errors.hpp"
#include "causattr/maxent.hpp"

namespace causattr {

std::vector<std::string> pipeline_names() { return {"constant", "mean-w", "maxent", "fit+attribute"}; }

Estimates attribution_estimates(const FitResult& fit, const Dataset& data, const PipelineOptions& options) {
    Estimates out;
    for (const auto& [g, p] : model_posterior(fit.params, Evidence::none(), &data)) out["pi." + g.str()] = p;
    if (!options.evidence.empty()) {
        ClassDistribution post = model_posterior(fit.params, options.evidence, &data);
        for (const auto& [g, p] : post) out["posterior." + g.str()] = p;
        for (const auto& [cause, s] : responsibility_shares(post, options.shares)) out["share." + cause] = s;
    }
    return out;
}

Estimator make_pipeline(const std::string& name, const PipelineOptions& options) {
    if (name == "constant") {
        return [](const Dataset&) { return Estimates{{"constant", 1.0}}; };
    }
    if (name == "mean-w") {
        return [](const Dataset& d) { return Estimates{{"mean_w", d.w().mean()}}; };
    }
    if (name == "maxent") {
        return [](const Dataset& d) {
            Estimates out;
            for (const auto& [g, p] : maxent_mono(rates_from_counts(d.counts()))) out["pi." + g.str()] = p;
            return out;
        };
    }
    if (name == "fit+attribute") {
        return [options](const Dataset& d) {
            FitResult fit = fit_em(d, options.monotone, options.restriction, options.em);
            if (options.require_convergence && !fit.converged) throw ModelError("EM did not converge");
            return attribution_estimates(fit, d, options);
        };
    }
    throw InputError("unknown pipeline '" + name + "'");
}

}  // namespace causattr
