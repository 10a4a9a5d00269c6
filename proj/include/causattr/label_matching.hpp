#pragma once

#include <array>
#include <optional>
#include <vector>

#include "causattr/em.hpp"
#include "causattr/latent_model.hpp"

namespace causattr {

struct GaussianComponent {
    double weight = 0.0;
    double mean = 0.0;
    double variance = 1.0;
};

struct UnivariateMixtureFit {
    std::vector<GaussianComponent> components;  // sorted by mean
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Maximum-likelihood k-component normal mixture for a sample, best of
// config.n_starts starts: spaced quantiles, then k-means++ seeds.
UnivariateMixtureFit fit_univariate_mixture(const std::vector<double>& sample, int k, const EmConfig& config = {});

// Mixture fitted within one evidence stratum.
struct StratumFit {
    double stratum_probability = 0.0;  // pr(Y = y | Z = z, M = m)
    std::vector<GaussianComponent> components;
};

enum class MatchKey { proportion, mean, variance };

struct LabelAssignment {
    // labels[e][j]: class of component j in stratum e, empty when unmatched.
    std::array<std::vector<std::optional<LatentClass>>, 8> labels;
    std::vector<LatentClass> matched_classes;
    std::vector<std::pair<int, int>> unmatched;  // (evidence index, component index)
};

// Assigns components across the eight strata to latent classes: class rstu
// must appear in strata (0,0,r), (0,1,s), (1,0,t), (1,1,u) with keys that
// agree within tol. A component admitting two matches throws ModelError.
LabelAssignment match_class_labels(const std::array<StratumFit, 8>& fits, MatchKey key, double tol,
                                   bool monotone = false);

}  // namespace causattr
