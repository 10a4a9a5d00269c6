#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "causattr/dataset.hpp"
#include "causattr/mixture_model.hpp"

namespace causattr {

struct EmConfig {
    int max_iter = 2000;
    double rel_tol = 1e-8;
    int n_starts = 10;
    std::uint64_t seed = 1;
    // Absolute floor on every component variance; defaults to 1e-6 var(W).
    std::optional<double> variance_floor;
    // Worker threads for independent starts; 0 picks the hardware concurrency.
    int threads = 0;
};

struct FitResult {
    MixtureModelParams params;
    double loglik = 0.0;
    double aic = 0.0;
    int iterations = 0;
    bool converged = false;
    int n_free_params = 0;
    int best_start = 0;
    int theta_unconverged = 0;  // M-steps where the logistic fit stopped before its tolerance
    double variance_floor = 0.0;
    std::vector<double> trace;         // log-likelihood at every iteration of the best start
    std::vector<double> start_logliks; // final log-likelihood per start, NaN for failed starts
};

// Rows: units; columns: classes of params. Zero outside each unit's compatible set.
using Responsibilities = Eigen::MatrixXd;

Responsibilities e_step(const MixtureModelParams& params, const Dataset& data);

struct ThetaFitInfo {
    int iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
};

// Weighted multinomial logistic regression of the soft labels on x; the
// first column is the reference class. Newton with step halving, started
// from theta_init (zeros when empty).
Eigen::MatrixXd m_step_theta(const Responsibilities& resp, const Dataset& data,
                             const Eigen::MatrixXd& theta_init = {}, ThetaFitInfo* info = nullptr);

// Weighted least squares per (cell, class) component, pooled as the
// restriction demands, variances floored. Components whose total weight is
// negligible keep their current values. Throws ModelError on rank deficiency.
void m_step_beta(const Responsibilities& resp, const Dataset& data, MixtureModelParams& params,
                 double variance_floor);

double log_likelihood(const MixtureModelParams& params, const Dataset& data);

// Marks components active exactly when their evidence stratum has units.
void activate_components(MixtureModelParams& params, const Dataset& data);

int count_free_params(const MixtureModelParams& params);
double aic(double loglik, int n_free_params);
double aic(const FitResult& fit);

double default_variance_floor(const Dataset& data);

// Best of config.n_starts random starts by final log-likelihood. Throws
// ModelError when no start yields a finite likelihood.
FitResult fit_em(const Dataset& data, bool monotone, Restriction restriction, const EmConfig& config = {});

// Single EM run from the given parameters.
FitResult run_em(const Dataset& data, MixtureModelParams init, const EmConfig& config);

}  // namespace causattr
