#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "causattr/dataset.hpp"

namespace causattr {

// Named scalar outputs of one estimator run.
using Estimates = std::map<std::string, double>;
// Throws causattr::Error when the estimate cannot be formed on a resample.
using Estimator = std::function<Estimates(const Dataset&)>;

struct BootstrapConfig {
    int replicates = 500;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 picks the hardware concurrency
    double max_failure_fraction = 0.2;
};

struct EstimandSummary {
    double point = 0.0;    // estimator on the original data
    double mean = 0.0;     // across successful replicates
    double se = 0.0;       // replicate standard deviation
    double ci_low = 0.0;   // 2.5% percentile
    double ci_high = 0.0;  // 97.5% percentile
};

struct BootstrapResult {
    std::map<std::string, EstimandSummary> estimands;
    int replicates = 0;
    int n_failed = 0;
};

// Unit-level resampling with replacement; replicate b draws from its own
// substream. Throws ModelError when more than max_failure_fraction of the
// replicates fail.
BootstrapResult bootstrap(const Dataset& data, const Estimator& estimator, const BootstrapConfig& config = {});

// Linear-interpolation quantile of an unsorted sample.
double sample_quantile(std::vector<double> values, double q);

}  // namespace causattr
