#include "doctest.h"

#include <random>

#include "causattr/bounds.hpp"
#include "causattr/errors.hpp"
#include "causattr/posterior.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace causattr;
using fixture::cls;
using fixture::near;

namespace {

const std::array<LatentClass, 6> kMono{LatentClass::from_code(0), LatentClass::from_code(1),
                                       LatentClass::from_code(3), LatentClass::from_code(5),
                                       LatentClass::from_code(7), LatentClass::from_code(15)};

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("asbestos class bounds") {
    CellRates d = rates_from_counts(fixture::asbestos_counts());
    IntervalBounds b = class_bounds_mono(d);
    auto lo = [&](const char* g) { return 100 * b.at(cls(g)).lower; };
    auto hi = [&](const char* g) { return 100 * b.at(cls(g)).upper; };
    CHECK(near(lo("0001"), 3.00, 0.01));
    CHECK(near(hi("0001"), 3.55, 0.01));
    CHECK(near(lo("0011"), 0.28, 0.01));
    CHECK(near(hi("0011"), 0.83, 0.01));
    CHECK(near(lo("0101"), 0.00, 0.01));
    CHECK(near(hi("0101"), 0.55, 0.01));
    CHECK(near(lo("0111"), 0.00, 0.01));
    CHECK(near(hi("0111"), 0.55, 0.01));
    CHECK(b.at(cls("0000")).point());
    CHECK(b.at(cls("1111")).point());
    CHECK(near(lo("0000"), 95.50, 0.01));
    CHECK(near(lo("1111"), 0.12, 0.01));
}

TEST_CASE("asbestos posterior bounds") {
    CellRates d = rates_from_counts(fixture::asbestos_counts());
    IntervalBounds b = posterior_bounds(d, Evidence::of(1, 1, 1));
    CHECK(b.classes.size() == 5);
    CHECK(near(100 * b.at(cls("0001")).lower, 66.66, 0.01));
    CHECK(near(100 * b.at(cls("0001")).upper, 78.85, 0.01));
    CHECK(near(100 * b.at(cls("0011")).lower, 6.33, 0.01));
    CHECK(near(100 * b.at(cls("0011")).upper, 18.51, 0.01));
    CHECK(near(100 * b.at(cls("1111")).lower, 2.64, 0.01));
    CHECK(b.at(cls("1111")).point());

    IntervalBounds doomed = posterior_bounds(d, Evidence::of(0, 0, 1));
    REQUIRE(doomed.classes.size() == 1);
    CHECK(doomed.at(cls("1111")).lower == 1.0);
    CHECK(doomed.at(cls("1111")).upper == 1.0);
    IntervalBounds immune = posterior_bounds(d, Evidence::of(1, 1, 0));
    REQUIRE(immune.classes.size() == 1);
    CHECK(immune.at(cls("0000")).lower == 1.0);
}

TEST_CASE("contract and infeasibility errors") {
    CellRates d = rates_from_counts(fixture::asbestos_counts());
    CHECK_THROWS_AS(posterior_bounds(d, Evidence::none()), ContractError);
    CHECK_THROWS_AS(class_bounds_mono(CellRates(0.5, 0.2, 0.6, 0.7)), InfeasibleError);
    CHECK_THROWS_AS(monotone_family(CellRates(0.3, 0.4, 0.2, 0.6)), InfeasibleError);  // C > A
    // zero-mass stratum: delta_00 = 0 leaves (0,0,1) undefined
    CHECK_THROWS_AS(posterior_bounds(CellRates(0.0, 0.1, 0.2, 0.4), Evidence::of(0, 0, 1)), InfeasibleError);
}

TEST_CASE("collapsed interval") {
    // d01 = d00 and d10 = d11 give B = 0, so t is pinned at 0.
    CellRates d(0.1, 0.1, 0.4, 0.4);
    MonotoneFamily f = monotone_family(d);
    CHECK(f.B == doctest::Approx(0.0));
    CHECK(f.degenerate());
    IntervalBounds b = class_bounds_mono(d);
    for (const auto& [g, iv] : b.classes) CHECK(iv.width() == doctest::Approx(0.0));
}

TEST_CASE("family members reproduce the rates") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        auto pi = oracle::random_mono_pi(rng);
        CellRates d = oracle::rates_from_pi(pi);
        MonotoneFamily f = monotone_family(d);
        for (int i = 0; i <= 20; ++i) {
            double t = f.t_lo + (f.t_hi - f.t_lo) * i / 20.0;
            ClassDistribution dist = f.at(t);
            CHECK_NOTHROW(dist.validate(enumerate_classes(true), 1e-12));
            CellRates back = implied_rates(dist);
            for (int c = 0; c < 4; ++c) CHECK(near(back.delta[c], d.delta[c], 1e-12));
        }
    }
}

TEST_CASE("class bounds agree with the LP oracle") {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 100; ++rep) {
        CellRates d = oracle::rates_from_pi(oracle::random_mono_pi(rng));
        IntervalBounds b = class_bounds_mono(d);
        auto lp = oracle::lp_class_bounds(d);
        for (int j = 0; j < 6; ++j) {
            CHECK(near(b.at(kMono[j]).lower, lp[j].lo, 1e-10));
            CHECK(near(b.at(kMono[j]).upper, lp[j].hi, 1e-10));
        }
    }
}

TEST_CASE("posterior bounds match a dense grid of feasible distributions") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        CellRates d = oracle::rates_from_pi(oracle::random_mono_pi(rng));
        auto grid = oracle::grid_feasible(d, 2000);
        for (Evidence ev : all_evidence()) {
            IntervalBounds b = posterior_bounds(d, ev);
            const double mass = d.evidence_mass(ev);
            for (int j = 0; j < 6; ++j) {
                LatentClass g = kMono[j];
                if (outcome_under(g, ev.cell()) != ev.y()) {
                    CHECK(b.classes.count(g) == 0);
                    continue;
                }
                double lo = 1e300, hi = -1e300;
                for (const auto& v : grid) {
                    lo = std::min(lo, v[j] / mass);
                    hi = std::max(hi, v[j] / mass);
                }
                CHECK(near(b.at(g).lower, lo, 1e-9));
                CHECK(near(b.at(g).upper, hi, 1e-9));
            }
        }
    }
}

TEST_CASE("bounds widen with the feasible parameter range") {
    // Raising d11 and lowering d00 by eps keeps C and grows A and B, so the
    // range of t widens; no interval may get narrower.
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        CellRates d = oracle::rates_from_pi(oracle::random_mono_pi(rng));
        const double eps = 0.5 * std::min(d[{0, 0}], 1.0 - d[{1, 1}]);
        CellRates wider = d;
        wider[{0, 0}] -= eps;
        wider[{1, 1}] += eps;
        MonotoneFamily f = monotone_family(d), fw = monotone_family(wider);
        REQUIRE(fw.t_lo <= f.t_lo + 1e-15);
        REQUIRE(fw.t_hi >= f.t_hi - 1e-15);
        auto b = class_bounds_mono(d), bw = class_bounds_mono(wider);
        for (const auto& [g, iv] : b.classes) CHECK(bw.at(g).width() >= iv.width() - 1e-15);
    }
}

}
