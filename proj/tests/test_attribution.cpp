#include "doctest.h"

#include <random>

#include "causattr/attribution.hpp"
#include "causattr/datagen.hpp"
#include "causattr/em.hpp"
#include "causattr/errors.hpp"
#include "causattr/posterior.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace causattr;
using fixture::cls;
using fixture::near;

namespace {

ClassDistribution random_dist(std::mt19937_64& rng, bool monotone) {
    std::gamma_distribution<double> g(1.0, 1.0);
    ClassDistribution d;
    double s = 0.0;
    std::vector<double> v;
    for (auto c : enumerate_classes(monotone)) {
        v.push_back(g(rng) + 1e-3);
        s += v.back();
    }
    auto classes = enumerate_classes(monotone);
    for (std::size_t i = 0; i < classes.size(); ++i) d.set(classes[i], v[i] / s);
    return d;
}

// Intercept-only monotone model with the given priors (log scale, 0000 = 0)
// and component means/variances in one exposure cell.
MixtureModelParams toy_model(const std::map<std::string, double>& log_prior, ExposureCell cell,
                             const std::map<std::string, std::pair<double, double>>& comps) {
    MixtureModelParams p(true, Restriction::none, 1);
    for (const auto& [g, v] : log_prior) p.theta()(p.class_index(cls(g.c_str())), 0) = v;
    for (const auto& [g, ms] : comps) {
        ComponentParams& cp = p.component(cell, p.class_index(cls(g.c_str())));
        cp.mu = Eigen::VectorXd::Constant(1, ms.first);
        cp.sigma2 = ms.second;
        cp.active = true;
    }
    return p;
}

}  // namespace

TEST_SUITE("attribution") {

TEST_CASE("posterior from the reference prior") {
    // The reference prior is rounded to 0.01 points, so it reproduces the
    // observed rates only to about 1e-4 and the posterior to about 0.1 points.
    ClassDistribution prior = fixture::percent_dist(fixture::kEmPrior);
    CellRates d = rates_from_counts(fixture::asbestos_counts());
    ClassDistribution post = posterior_given_evidence(prior, d, Evidence::of(1, 1, 1), 1e-4);
    for (const auto& [g, pct] : fixture::kEmPosterior111) CHECK(near(100 * post[cls(g.c_str())], pct, 0.15));
    CHECK(near(post.total(), 1.0, 1e-12));

    ClassDistribution doomed = posterior_given_evidence(prior, d, Evidence::of(0, 0, 1), 1e-4);
    REQUIRE(doomed.size() == 1);
    CHECK(doomed[cls("1111")] == 1.0);

    ClassDistribution same = posterior_given_evidence(prior, d, Evidence::none());
    for (const auto& [g, p] : prior) CHECK(same[g] == p);

    CHECK_THROWS_AS(posterior_given_evidence(prior, d, Evidence::of(1, 1, 1)), ContractError);
}

TEST_CASE("zero-probability stratum") {
    ClassDistribution pi;
    pi.set(cls("0000"), 0.7);
    pi.set(cls("0001"), 0.3);
    CHECK_THROWS_AS(posterior_given_evidence(pi, implied_rates(pi), Evidence::of(0, 0, 1)), InfeasibleError);
}

TEST_CASE("law of total probability") {
    std::mt19937_64 rng(17);
    for (bool mono : {true, false}) {
        for (int rep = 0; rep < 25; ++rep) {
            ClassDistribution pi = random_dist(rng, mono);
            CellRates d = implied_rates(pi);
            for (ExposureCell c : kAllCells) {
                ClassDistribution p1 = posterior_given_evidence(pi, d, Evidence::of(c, 1));
                ClassDistribution p0 = posterior_given_evidence(pi, d, Evidence::of(c, 0));
                CHECK(near(p1.total(), 1.0, 1e-10));
                CHECK(near(p0.total(), 1.0, 1e-10));
                for (const auto& [g, p] : pi) CHECK(near(d[c] * p1[g] + (1 - d[c]) * p0[g], p, 1e-12));
            }
        }
    }
}

TEST_CASE("extended evidence update") {
    ClassDistribution post;
    post.set(cls("0001"), 0.6);
    post.set(cls("0011"), 0.4);
    std::map<LatentClass, double> equal{{cls("0001"), -2.0}, {cls("0011"), -2.0}};
    ClassDistribution same = posterior_given_extended(post, equal);
    CHECK(near(same[cls("0001")], 0.6, 1e-15));
    CHECK(near(same[cls("0011")], 0.4, 1e-15));

    std::map<LatentClass, double> skew{{cls("0001"), std::log(0.5)}, {cls("0011"), std::log(1.5)}};
    ClassDistribution upd = posterior_given_extended(post, skew);
    CHECK(near(upd[cls("0001")], 0.3 / (0.3 + 0.6), 1e-15));

    std::map<LatentClass, double> dead{{cls("0001"), -INFINITY}, {cls("0011"), -INFINITY}};
    CHECK_THROWS_AS(posterior_given_extended(post, dead), ModelError);
    CHECK_THROWS_AS(posterior_given_extended(post, {{cls("0001"), 0.0}}), ContractError);
}

TEST_CASE("single compatible class is certain for every w") {
    auto p = toy_model({}, {0, 0}, {{"1111", {55.0, 25.0}}});
    PosteriorCurve c = posterior_curve(p, Evidence::of(0, 0, 1), linear_grid(0, 200, 50));
    REQUIRE(c.classes.size() == 1);
    for (double v : c.probability[0]) CHECK(v == 1.0);
    CHECK(c.crossings.empty());
}

TEST_CASE("symmetric two-class crossing") {
    auto p = toy_model({{"0101", 0.0}, {"0111", 0.0}, {"1111", -60.0}}, {0, 1},
                       {{"0101", {-1.0, 1.0}}, {"0111", {1.0, 1.0}}, {"1111", {0.0, 1.0}}});
    PosteriorCurve c = posterior_curve(p, Evidence::of(0, 1, 1), linear_grid(-3, 3.3, 21));
    REQUIRE(c.crossings.size() == 1);
    CHECK(near(c.crossings[0].w, 0.0, 1e-9));
    CHECK(c.crossings[0].from == cls("0101"));
    CHECK(c.crossings[0].to == cls("0111"));
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < c.classes.size(); ++k) s += c.probability[k][i];
        CHECK(near(s, 1.0, 1e-10));
    }
    CHECK_THROWS_AS(posterior_curve(p, Evidence::of(0, 1, 1), {1.0, 1.0}), ContractError);
}

TEST_CASE("integrating over W recovers the evidence posterior") {
    auto p = toy_model({{"0001", 1.0}, {"0011", 0.2}, {"0101", -0.5}, {"0111", -1.0}, {"1111", -2.0}}, {1, 1},
                       {{"0001", {70, 9}}, {"0011", {68, 42}}, {"0101", {65, 36}}, {"0111", {58, 4}}, {"1111", {55, 25}}});
    const Evidence ev = Evidence::of(1, 1, 1);
    ClassDistribution base = model_posterior(p, ev);
    std::vector<LatentClass> classes;
    std::vector<double> probs;
    for (const auto& [g, q] : base) {
        classes.push_back(g);
        probs.push_back(q);
    }
    std::mt19937_64 rng(4);
    std::discrete_distribution<int> pick(probs.begin(), probs.end());
    std::normal_distribution<double> z(0.0, 1.0);
    const int n = 200000;
    std::map<LatentClass, double> acc;
    for (int i = 0; i < n; ++i) {
        LatentClass g = classes[pick(rng)];
        const ComponentParams& cp = p.component({1, 1}, p.class_index(g));
        double w = cp.mu(0) + std::sqrt(cp.sigma2) * z(rng);
        for (const auto& [h, q] : model_posterior_extended(p, {ev, w})) acc[h] += q / n;
    }
    for (const auto& [g, q] : base) CHECK(near(acc[g], q, 1e-3 + 3 * std::sqrt(q * (1 - q) / n)));
}

TEST_CASE("covariate posteriors average over stratum units") {
    MixtureModelParams p(true, Restriction::none, 2);
    p.theta()(1, 1) = 1.5;
    p.theta()(2, 0) = -0.5;
    p.theta()(5, 1) = -1.0;
    std::vector<UnitRecord> recs;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int i = 0; i < 40; ++i) recs.push_back({1, 1, i % 3 == 0 ? 0 : 1, 60.0, {1.0, z(rng)}});
    Dataset data(recs);
    const Evidence ev = Evidence::of(1, 1, 1);
    ClassDistribution got = model_posterior(p, ev, &data);
    std::map<LatentClass, double> want;
    int units = 0;
    for (const auto& r : data.records()) {
        if (r.evidence() != ev) continue;
        ++units;
        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(r.x.data(), 2);
        ClassDistribution prior = class_prior(p, x);
        for (const auto& [g, q] : posterior_given_evidence(prior, ev)) want[g] += q;
    }
    for (auto& [g, q] : want) CHECK(near(got[g], q / units, 1e-12));
    CHECK(near(got.total(), 1.0, 1e-12));
    CHECK_THROWS_AS(model_posterior(p, ev), ContractError);
}

TEST_CASE("responsibility shares") {
    ClassDistribution post = fixture::percent_dist(fixture::kEmPosterior111);
    auto totals = responsibility_shares(post, default_attribution("smoking", "asbestos"));
    CHECK(near(100 * totals.at("smoking"), 51.84, 0.01));
    CHECK(near(100 * totals.at("asbestos"), 45.52, 0.01));
    CHECK(near(100 * totals.at(kOtherCause), 2.64, 0.01));
    double s = 0.0;
    for (const auto& [k, v] : totals) s += v;
    CHECK(near(s, 1.0, 1e-12));

    ClassDistribution doomed;
    doomed.set(cls("1111"), 1.0);
    auto t2 = responsibility_shares(doomed, default_attribution());
    CHECK(t2.at(kOtherCause) == 1.0);
    CHECK(t2.at("z") == 0.0);

    AttributionMatrix a;
    a.shares[cls("0011")] = {{"a", 1.0}, {"b", 0.0}};
    a.shares[cls("0101")] = {{"a", 0.0}, {"b", 1.0}};
    ClassDistribution half;
    half.set(cls("0011"), 0.5);
    half.set(cls("0101"), 0.5);
    auto t3 = responsibility_shares(half, a);
    CHECK(t3.at("a") == 0.5);
    CHECK(t3.at("b") == 0.5);
    CHECK(t3.at(kOtherCause) == 0.0);
}

TEST_CASE("default attribution matrix") {
    AttributionMatrix a = default_attribution();
    CHECK(a.shares.at(cls("0001")).at("z") == 0.5);
    CHECK(a.shares.at(cls("0001")).at("m") == 0.5);
    CHECK(a.shares.at(cls("0011")).at("z") == 1.0);
    CHECK(a.shares.at(cls("0101")).at("m") == 1.0);
    CHECK(a.shares.at(cls("0111")).at("z") == 0.5);
    CHECK(a.causes() == std::vector<std::string>{"m", "z"});
    CHECK_NOTHROW(a.validate());

    AttributionMatrix bad;
    bad.shares[cls("0001")] = {{"a", 0.7}, {"b", 0.7}};
    CHECK_THROWS_AS(bad.validate(), InputError);
    AttributionMatrix reserved;
    reserved.shares[cls("0001")] = {{"other", 0.5}};
    CHECK_THROWS_AS(reserved.validate(), InputError);
}


TEST_CASE("fitted replica posteriors are distributions") {
    Dataset d = generate_asbestos_replica(3).data;
    EmConfig cfg;
    cfg.n_starts = 1;
    cfg.max_iter = 100;
    FitResult fit = fit_em(d, true, Restriction::none, cfg);
    for (int e = 0; e < 8; ++e) {
        ClassDistribution post = model_posterior(fit.params, Evidence::from_index(e), &d);
        CHECK(near(post.total(), 1.0, 1e-10));
        for (const auto& [g, q] : post) CHECK(q >= 0.0);
    }
    PosteriorCurve c = posterior_curve(fit.params, Evidence::of(0, 0, 1), linear_grid(0, 150, 100), &d);
    REQUIRE(c.classes.size() == 1);
    for (double v : c.probability[0]) CHECK(v == 1.0);
}

}
