#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "causattr/dataset.hpp"
#include "causattr/rng.hpp"

namespace causattr {

enum class ErrorDist { normal, t5, uniform, bernoulli, gamma };

std::string to_string(ErrorDist e);
ErrorDist parse_error_dist(const std::string& text);  // throws InputError

// Error with mean 0 and variance 1 drawn from the named family.
double standardized_error(ErrorDist dist, StreamRng& rng);

// Simulation design: X = (1, X1, X2) with standard normal X1, X2;
// (Z, M) and G from softmax models; W = mu_G' X + sigma_G * error.
struct SimParams {
    Eigen::MatrixXd alpha;  // 4 x 3, rows in exposure-cell order, row 0 zero
    Eigen::MatrixXd theta;  // 6 x 3, rows in monotone class order, row 0 zero
    Eigen::MatrixXd mu;     // 6 x 3, shared by every exposure cell
    Eigen::VectorXd sigma;  // 6
};

SimParams default_sim_params();

struct SimConfig {
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    ErrorDist error_dist = ErrorDist::normal;
    SimParams params = default_sim_params();
};

// Each unit draws from its own substream, so unit i does not depend on n.
LabeledDataset generate_simulation(const SimConfig& cfg);

// Intercept-only replica of the smoking and asbestos cohort: fixed counts
// per (z, m, y) stratum and W from per-stratum normal mixtures over the
// compatible monotone classes.
LabeledDataset generate_asbestos_replica(std::uint64_t seed);

struct ReplicaClassDensity {
    LatentClass g;
    double mean;
    double sd;
};

struct ReplicaStratum {
    Evidence ev;
    std::size_t count;
    std::vector<std::pair<LatentClass, double>> weights;
};

const std::vector<ReplicaClassDensity>& replica_class_densities();
const std::vector<ReplicaStratum>& replica_strata();

}  // namespace causattr
