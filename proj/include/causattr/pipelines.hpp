#pragma once

#include <string>
#include <vector>

#include "causattr/attribution.hpp"
#include "causattr/bootstrap.hpp"
#include "causattr/em.hpp"

namespace causattr {

struct PipelineOptions {
    bool monotone = true;
    Restriction restriction = Restriction::none;
    EmConfig em;
    Evidence evidence = Evidence::of(1, 1, 1);
    AttributionMatrix shares = default_attribution();
    bool require_convergence = true;
};

// constant:       {"constant": 1}
// mean-w:         {"mean_w": sample mean of W}
// maxent:         maximum-entropy class probabilities from the cell counts
// fit+attribute:  EM fit, then class probabilities, the evidence posterior
//                 and responsibility shares
Estimator make_pipeline(const std::string& name, const PipelineOptions& options = {});

std::vector<std::string> pipeline_names();

// The fit+attribute estimates for an existing fit.
Estimates attribution_estimates(const FitResult& fit, const Dataset& data, const PipelineOptions& options);

}  // namespace causattr
