#include "causattr/datagen.hpp"

#include <cmath>
#include <random>

#include "causattr/errors.hpp"

namespace causattr {

namespace {

int draw_categorical(const Eigen::VectorXd& logits, StreamRng& rng) {
    Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp();
    double u = rng.uniform() * p.sum();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        acc += p(k);
        if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(p.size() - 1);
}

}  // namespace

std::string to_string(ErrorDist e) {
    switch (e) {
        case ErrorDist::normal: return "normal";
        case ErrorDist::t5: return "t5";
        case ErrorDist::uniform: return "uniform";
        case ErrorDist::bernoulli: return "bernoulli";
        case ErrorDist::gamma: return "gamma";
    }
    return "normal";
}

ErrorDist parse_error_dist(const std::string& text) {
    for (ErrorDist e : {ErrorDist::normal, ErrorDist::t5, ErrorDist::uniform, ErrorDist::bernoulli, ErrorDist::gamma}) {
        if (text == to_string(e)) return e;
    }
    throw InputError("error distribution must be normal, t5, uniform, bernoulli or gamma, got '" + text + "'");
}

double standardized_error(ErrorDist dist, StreamRng& rng) {
    switch (dist) {
        case ErrorDist::normal: return std::normal_distribution<double>(0.0, 1.0)(rng);
        case ErrorDist::t5: return std::student_t_distribution<double>(5.0)(rng) / std::sqrt(5.0 / 3.0);
        case ErrorDist::uniform: return (2.0 * rng.uniform() - 1.0) / std::sqrt(1.0 / 3.0);
        case ErrorDist::bernoulli: return rng.uniform() < 0.5 ? -1.0 : 1.0;
        case ErrorDist::gamma:
            // shape 2, rate 0.5: mean 4, variance 8
            return (std::gamma_distribution<double>(2.0, 2.0)(rng) - 4.0) / std::sqrt(8.0);
    }
    return 0.0;
}

SimParams default_sim_params() {
    SimParams p;
    p.alpha.resize(4, 3);
    p.alpha << 0.0, 0.0, 0.0,
               -0.36, -0.37, -0.26,
               -0.28, -0.19, 0.29,
               -0.28, -0.19, 0.29;
    p.theta.resize(6, 3);
    p.theta << 0.0, 0.0, 0.0,
               -0.07, 0.36, 0.06,
               0.03, -0.38, -0.37,
               -0.19, 0.08, -0.27,
               0.38, -0.03, 0.25,
               -0.10, 0.27, 0.30;
    p.mu.resize(6, 3);
    p.mu << -5.0, -1.77, -1.39,
            -3.0, -1.46, 1.40,
            -1.0, -1.72, -0.41,
            1.0, 1.62, -1.29,
            3.0, -1.08, 1.595,
            5.0, 0.35, -0.06;
    p.sigma.resize(6);
    p.sigma << 0.65, 1.38, 1.81, 1.17, 1.16, 1.39;
    return p;
}

LabeledDataset generate_simulation(const SimConfig& cfg) {
    if (cfg.n < 1) throw ContractError("sample size must be at least 1");
    const SimParams& p = cfg.params;
    const auto classes = enumerate_classes(true);
    if (p.alpha.rows() != 4 || p.theta.rows() != static_cast<Eigen::Index>(classes.size()) ||
        p.mu.rows() != p.theta.rows() || p.sigma.size() != p.theta.rows() || p.alpha.cols() != p.theta.cols() ||
        p.mu.cols() != p.theta.cols()) {
        throw ContractError("simulation parameter shapes are inconsistent");
    }
    const Eigen::Index dim = p.theta.cols();
    std::vector<UnitRecord> records(cfg.n);
    std::vector<LatentClass> labels(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        StreamRng rng(cfg.seed, i);
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::VectorXd x(dim);
        x(0) = 1.0;
        for (Eigen::Index j = 1; j < dim; ++j) x(j) = normal(rng);
        ExposureCell cell = ExposureCell::from_index(draw_categorical(p.alpha * x, rng));
        int k = draw_categorical(p.theta * x, rng);
        LatentClass g = classes[k];
        double eps = standardized_error(cfg.error_dist, rng);
        UnitRecord& r = records[i];
        r.z = cell.z;
        r.m = cell.m;
        r.y = outcome_under(g, cell);
        r.w = p.mu.row(k).dot(x) + p.sigma(k) * eps;
        r.x.assign(x.data(), x.data() + dim);
        labels[i] = g;
    }
    return {Dataset(std::move(records)), std::move(labels)};
}

const std::vector<ReplicaClassDensity>& replica_class_densities() {
    static const std::vector<ReplicaClassDensity> d{
        {LatentClass(0, 0, 0, 0), 72.0, 4.0}, {LatentClass(0, 0, 0, 1), 70.0, 3.0},
        {LatentClass(0, 0, 1, 1), 68.0, 6.5}, {LatentClass(0, 1, 0, 1), 65.0, 6.0},
        {LatentClass(0, 1, 1, 1), 58.0, 2.0}, {LatentClass(1, 1, 1, 1), 55.0, 5.0},
    };
    return d;
}

const std::vector<ReplicaStratum>& replica_strata() {
    const LatentClass c0000(0, 0, 0, 0), c0001(0, 0, 0, 1), c0011(0, 0, 1, 1), c0101(0, 1, 0, 1),
        c0111(0, 1, 1, 1), c1111(1, 1, 1, 1);
    static const std::vector<ReplicaStratum> s{
        {Evidence::of(0, 0, 0), 5051, {{c0000, 0.9561}, {c0001, 0.0320}, {c0011, 0.0064}, {c0101, 0.0035}, {c0111, 0.0020}}},
        {Evidence::of(0, 0, 1), 6, {{c1111, 1.0}}},
        {Evidence::of(0, 1, 0), 744, {{c0000, 0.9614}, {c0001, 0.0322}, {c0011, 0.0064}}},
        {Evidence::of(0, 1, 1), 5, {{c0101, 0.5289}, {c0111, 0.2934}, {c1111, 0.1777}}},
        {Evidence::of(1, 0, 0), 12265, {{c0000, 0.9641}, {c0001, 0.0323}, {c0101, 0.0036}}},
        {Evidence::of(1, 0, 1), 118, {{c0011, 0.6700}, {c0111, 0.2055}, {c1111, 0.1245}}},
        {Evidence::of(1, 1, 0), 2989, {{c0000, 1.0}}},
        {Evidence::of(1, 1, 1), 141, {{c0001, 0.7101}, {c0011, 0.1417}, {c0101, 0.0784}, {c0111, 0.0435}, {c1111, 0.0263}}},
    };
    return s;
}

LabeledDataset generate_asbestos_replica(std::uint64_t seed) {
    std::vector<UnitRecord> records;
    std::vector<LatentClass> labels;
    const auto& densities = replica_class_densities();
    for (const ReplicaStratum& st : replica_strata()) {
        StreamRng rng(seed, static_cast<std::uint64_t>(st.ev.index()));
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::VectorXd logw(st.weights.size());
        for (std::size_t j = 0; j < st.weights.size(); ++j) logw(j) = std::log(st.weights[j].second);
        for (std::size_t i = 0; i < st.count; ++i) {
            LatentClass g = st.weights[draw_categorical(logw, rng)].first;
            const ReplicaClassDensity* dens = nullptr;
            for (const auto& d : densities) {
                if (d.g == g) dens = &d;
            }
            UnitRecord r;
            r.z = st.ev.cell().z;
            r.m = st.ev.cell().m;
            r.y = st.ev.y();
            r.w = dens->mean + dens->sd * normal(rng);
            r.x = {1.0};
            records.push_back(std::move(r));
            labels.push_back(g);
        }
    }
    return {Dataset(std::move(records)), std::move(labels)};
}

}  // namespace causattr
