#include "doctest.h"

#include <sstream>

#include "causattr/cell_rates.hpp"
#include "causattr/errors.hpp"
#include "fixtures.hpp"

using namespace causattr;

TEST_SUITE("cell_rates") {

TEST_CASE("rates from counts") {
    CellRates d = rates_from_counts(fixture::asbestos_counts());
    CHECK(d[{0, 0}] == doctest::Approx(6.0 / 5057));
    CHECK(100 * d[{0, 0}] == doctest::Approx(0.12).epsilon(0.01));
    CHECK(100 * d[{0, 1}] == doctest::Approx(0.67).epsilon(0.01));
    CHECK(100 * d[{1, 0}] == doctest::Approx(0.95).epsilon(0.01));
    CHECK(100 * d[{1, 1}] == doctest::Approx(4.51).epsilon(0.01));

    CellCounts zero;
    for (auto& c : zero.cells) c = {0, 10};
    for (double v : rates_from_counts(zero).delta) CHECK(v == 0.0);
    CellCounts full;
    for (auto& c : full.cells) c = {7, 7};
    for (double v : rates_from_counts(full).delta) CHECK(v == 1.0);
}

TEST_CASE("invalid counts") {
    CellCounts c = fixture::asbestos_counts();
    c.cells[2].total = 0;
    CHECK_THROWS_AS(rates_from_counts(c), InputError);
    c = fixture::asbestos_counts();
    c.cells[1].cases = 800;
    CHECK_THROWS_AS(rates_from_counts(c), InputError);
}

TEST_CASE("scale invariance") {
    CellCounts c = fixture::asbestos_counts();
    CellCounts k = c;
    for (auto& cc : k.cells) {
        cc.cases *= 7;
        cc.total *= 7;
    }
    auto a = rates_from_counts(c), b = rates_from_counts(k);
    for (int i = 0; i < 4; ++i) CHECK(a.delta[i] == doctest::Approx(b.delta[i]).epsilon(1e-15));
}

TEST_CASE("identified masses") {
    auto m = identified_masses(rates_from_counts(fixture::asbestos_counts()));
    CHECK(100 * m.pi0000 == doctest::Approx(95.50).epsilon(1e-4));
    CHECK(100 * m.pi1111 == doctest::Approx(0.12).epsilon(0.02));
    CHECK(identified_masses(CellRates(0.1, 0.2, 0.3, 1.0)).pi0000 == 0.0);
    CHECK(identified_masses(CellRates(0.0, 0.2, 0.3, 0.5)).pi1111 == 0.0);
    // never exceeds the stratum totals it is drawn from
    CellRates d(0.05, 0.2, 0.3, 0.6);
    auto mm = identified_masses(d);
    CHECK(mm.pi0000 <= 1.0 - d[{0, 0}]);
    CHECK(mm.pi1111 <= d[{1, 1}]);
}

TEST_CASE("monotonicity consistency") {
    CHECK(monotonicity_consistency(rates_from_counts(fixture::asbestos_counts())).consistent);
    auto r = monotonicity_consistency(CellRates(0.5, 0.2, 0.6, 0.7));
    CHECK_FALSE(r.consistent);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0] == "delta00 <= delta01");
    CHECK(monotonicity_consistency(CellRates(0.3, 0.3, 0.3, 0.3)).consistent);
}

TEST_CASE("counts CSV") {
    std::istringstream in(fixture::kAsbestosCountsCsv);
    CellCounts c = read_counts_csv(in);
    CHECK(c[{1, 1}].cases == 141);
    CHECK(c[{1, 0}].total == 12383);

    std::istringstream bad_header("a,b,c,d\n0,0,1,2\n");
    CHECK_THROWS_AS(read_counts_csv(bad_header), InputError);
    std::istringstream missing("z,m,cases,total\n0,0,1,2\n0,1,1,2\n1,0,1,2\n");
    CHECK_THROWS_AS(read_counts_csv(missing), InputError);
    CHECK_THROWS_AS(read_counts_csv_file("/nonexistent/counts.csv"), InputError);
}

}
