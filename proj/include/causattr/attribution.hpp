#pragma once

#include <map>
#include <string>
#include <vector>

#include "causattr/dataset.hpp"
#include "causattr/mixture_model.hpp"
#include "causattr/posterior.hpp"

namespace causattr {

// Posterior over the compatible classes implied by a fitted model. With
// covariates, per-unit posteriors are averaged over the units of data that
// fall in the evidence stratum; without data the model must be
// intercept-only. Empty evidence averages the prior over all units.
ClassDistribution model_posterior(const MixtureModelParams& params, Evidence ev, const Dataset* data = nullptr);

// Posterior given evidence and a value of W, averaged over stratum units
// as above.
ClassDistribution model_posterior_extended(const MixtureModelParams& params, const ExtendedEvidence& ext,
                                           const Dataset* data = nullptr);

// Point where the dominant class changes from `from` to `to` as w increases.
struct Crossing {
    double w = 0.0;
    LatentClass from;
    LatentClass to;
};

struct PosteriorCurve {
    Evidence ev;
    std::vector<double> grid;
    std::vector<LatentClass> classes;
    std::vector<std::vector<double>> probability;  // [class][grid point]
    std::vector<Crossing> crossings;
};

// Evaluates model_posterior_extended along a strictly increasing grid and
// locates dominance switches by 40 bisection steps between grid points.
PosteriorCurve posterior_curve(const MixtureModelParams& params, Evidence ev, const std::vector<double>& grid,
                               const Dataset* data = nullptr);

// Evenly spaced grid with `steps` intervals.
std::vector<double> linear_grid(double lo, double hi, int steps);

// Normative split of each class's responsibility across named causes; the
// unassigned remainder goes to other factors.
struct AttributionMatrix {
    std::map<LatentClass, std::map<std::string, double>> shares;

    std::vector<std::string> causes() const;
    // Throws InputError unless shares lie in [0, 1] and sum to at most 1 per class.
    void validate() const;
};

inline constexpr const char* kOtherCause = "other";

// Synergistic and parallel classes split evenly, single-cause classes go
// wholly to their cause, immune and doomed classes to neither.
AttributionMatrix default_attribution(const std::string& z_cause = "z", const std::string& m_cause = "m");

// Cause totals: sum over classes of posterior times share, plus kOtherCause
// for the remainder.
std::map<std::string, double> responsibility_shares(const ClassDistribution& posterior,
                                                    const AttributionMatrix& attribution);

}  // namespace causattr
