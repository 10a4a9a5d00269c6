#pragma once

#include <map>

#include "causattr/cell_rates.hpp"
#include "causattr/latent_model.hpp"

namespace causattr {

inline constexpr double kRateConsistencyTol = 1e-6;

// Conditions a class distribution on evidence: classes whose outcome in the
// evidence cell matches y keep their mass, renormalized by the stratum
// probability. The prior must reproduce the rates d in every cell within
// consistency_tol (ContractError otherwise). Empty evidence returns pi.
// Throws InfeasibleError when the stratum probability is zero.
ClassDistribution posterior_given_evidence(const ClassDistribution& pi, const CellRates& d, Evidence ev,
                                           double consistency_tol = kRateConsistencyTol);

// Same, with the stratum probability implied by pi itself.
ClassDistribution posterior_given_evidence(const ClassDistribution& pi, Evidence ev);

// Rates implied by a class distribution: delta_c = sum of pi_g with outcome 1 in c.
CellRates implied_rates(const ClassDistribution& pi);

struct ExtendedEvidence {
    Evidence ev;
    double w = 0.0;
};

// Bayes update of an evidence posterior by per-class log densities of W.
// Throws ModelError when every density vanishes.
ClassDistribution posterior_given_extended(const ClassDistribution& evidence_posterior,
                                           const std::map<LatentClass, double>& log_densities);

}  // namespace causattr
