#include "doctest.h"

#include <random>

#include "causattr/datagen.hpp"
#include "causattr/errors.hpp"
#include "causattr/json_io.hpp"
#include "causattr/maxent.hpp"
#include "fixtures.hpp"

using namespace causattr;
using fixture::cls;
using fixture::near;
using nlohmann::json;

TEST_SUITE("json_io") {

TEST_CASE("fit roundtrip") {
    SimConfig sc;
    sc.n = 300;
    Dataset d = generate_simulation(sc).data;
    EmConfig cfg;
    cfg.n_starts = 2;
    cfg.max_iter = 50;
    for (Restriction r : {Restriction::none, Restriction::shared_means}) {
        FitResult fit = fit_em(d, true, r, cfg);
        FitResult back = fit_from_json(json::parse(to_json(fit).dump()));
        CHECK(back.params.monotone());
        CHECK(back.params.restriction() == r);
        CHECK(back.params.dim() == 3);
        CHECK((back.params.theta().array() == fit.params.theta().array()).all());
        CHECK(back.loglik == fit.loglik);
        CHECK(back.n_free_params == fit.n_free_params);
        CHECK(back.converged == fit.converged);
        for (int k = 0; k < fit.params.n_classes(); ++k) {
            for (ExposureCell c : kAllCells) {
                const ComponentParams& a = fit.params.component(c, k);
                const ComponentParams& b = back.params.component(c, k);
                CHECK(a.active == b.active);
                if (!a.active) continue;
                CHECK((a.mu.array() == b.mu.array()).all());
                CHECK(a.sigma2 == b.sigma2);
            }
        }
        CHECK(log_likelihood(back.params, d) == log_likelihood(fit.params, d));
    }
}

TEST_CASE("malformed fit JSON") {
    CHECK_THROWS_AS(fit_from_json(json::object()), InputError);
    json base = json::parse(R"({"model": {"monotone": true, "restriction": "none", "dim": 1,
        "theta": {"0000": [0], "0001": [0.5]},
        "beta": {"1,1,0001": {"mu": [70.0], "sigma2": 9.0}}}})");
    FitResult ok = fit_from_json(base);
    CHECK(ok.params.component({1, 1}, ok.params.class_index(cls("0001"))).active);
    CHECK(ok.n_free_params == count_free_params(ok.params));

    json bad = base;
    bad["model"]["theta"]["1010"] = {0.0};
    CHECK_THROWS_AS(fit_from_json(bad), InputError);
    bad = base;
    bad["model"]["theta"]["0001"] = {0.0, 1.0};
    CHECK_THROWS_AS(fit_from_json(bad), InputError);
    bad = base;
    bad["model"]["beta"]["1,1,0001"]["sigma2"] = -1.0;
    CHECK_THROWS_AS(fit_from_json(bad), InputError);
    bad = base;
    bad["model"]["beta"]["2,1,0001"] = base["model"]["beta"]["1,1,0001"];
    CHECK_THROWS_AS(fit_from_json(bad), InputError);
    bad = base;
    bad["model"]["restriction"] = "tied";
    CHECK_THROWS_AS(fit_from_json(bad), InputError);
    bad = base;
    bad["model"]["dim"] = "one";
    CHECK_THROWS_AS(fit_from_json(bad), InputError);
    CHECK_THROWS_AS(read_fit_file("/nonexistent/fit.json"), InputError);
}

TEST_CASE("attribution matrix roundtrip") {
    AttributionMatrix a = default_attribution("smoking", "asbestos");
    AttributionMatrix b = attribution_from_json(json::parse(to_json(a).dump()));
    CHECK(b.shares == a.shares);
    CHECK_THROWS_AS(attribution_from_json(json::array()), InputError);
    CHECK_THROWS_AS(attribution_from_json(json::parse(R"({"0001": {"a": "half"}})")), InputError);
    CHECK_THROWS_AS(attribution_from_json(json::parse(R"({"0021": {"a": 1.0}})")), InputError);
    CHECK_THROWS_AS(attribution_from_json(json::parse(R"({"0001": {"a": 0.9, "b": 0.9}})")), InputError);
}

TEST_CASE("summaries") {
    CellRates d = rates_from_counts(fixture::asbestos_counts());
    auto bj = to_json(class_bounds_mono(d));
    CHECK(bj.contains("0001"));
    double total = 0.0;
    auto mj = to_json(maxent_mono(d));
    for (const auto& [k, v] : mj.items()) total += v.get<double>();
    CHECK(near(total, 1.0, 1e-12));
    BootstrapResult r;
    r.replicates = 10;
    r.n_failed = 1;
    r.estimands["x"] = {1.0, 1.1, 0.2, 0.7, 1.4};
    auto j = to_json(r);
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["estimands"]["x"]["se"] == 0.2);
    CHECK(j["n_failed"] == 1);

    PosteriorCurve c;
    c.ev = Evidence::of(1, 1, 1);
    c.crossings.push_back({65.5, cls("0011"), cls("0001")});
    auto cj = crossings_json(c);
    CHECK(cj["crossings"][0]["w"] == 65.5);
    CHECK(cj["crossings"][0]["from"] == "0011");
}

}
