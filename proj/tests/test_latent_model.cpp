#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "causattr/errors.hpp"
#include "causattr/latent_model.hpp"
#include "fixtures.hpp"

using namespace causattr;
using fixture::cls;

TEST_SUITE("latent_model") {

TEST_CASE("class enumeration") {
    auto all = enumerate_classes(false);
    REQUIRE(all.size() == 16);
    for (int i = 0; i < 16; ++i) CHECK(all[i].code() == i);

    auto mono = enumerate_classes(true);
    std::vector<std::string> bits;
    for (auto g : mono) bits.push_back(g.str());
    CHECK(bits == std::vector<std::string>{"0000", "0001", "0011", "0101", "0111", "1111"});
    CHECK(std::find(mono.begin(), mono.end(), cls("0010")) == mono.end());
    for (auto g : mono) CHECK(std::find(all.begin(), all.end(), g) != all.end());
}

TEST_CASE("outcome lookup selects the cell's bit") {
    CHECK(outcome_under(cls("0001"), {1, 1}) == 1);
    CHECK(outcome_under(cls("0001"), {1, 0}) == 0);
    for (ExposureCell c : kAllCells) CHECK(outcome_under(cls("1111"), c) == 1);
    LatentClass g = cls("1010");
    CHECK(outcome_under(g, {0, 0}) == g.r());
    CHECK(outcome_under(g, {0, 1}) == g.s());
    CHECK(outcome_under(g, {1, 0}) == g.t());
    CHECK(outcome_under(g, {1, 1}) == g.u());
}

TEST_CASE("compatible classes") {
    CHECK(compatible_classes(Evidence::of(1, 1, 0), true) == std::vector<LatentClass>{cls("0000")});
    CHECK(compatible_classes(Evidence::of(0, 0, 1), true) == std::vector<LatentClass>{cls("1111")});
    auto c111 = compatible_classes(Evidence::of(1, 1, 1), false);
    CHECK(c111.size() == 8);
    for (auto g : c111) CHECK(g.u() == 1);
    CHECK_THROWS_AS(compatible_classes(Evidence::none(), true), ContractError);
}

TEST_CASE("monotone compatibility cardinalities") {
    std::map<std::string, std::size_t> expected{{"0,0,1", 1}, {"0,0,0", 5}, {"0,1,1", 3}, {"0,1,0", 3},
                                                {"1,0,1", 3}, {"1,0,0", 3}, {"1,1,1", 5}, {"1,1,0", 1}};
    for (Evidence ev : all_evidence()) CHECK(compatible_classes(ev, true).size() == expected.at(ev.str()));
}

TEST_CASE("compatible sets partition the class set") {
    for (bool mono : {true, false}) {
        for (ExposureCell c : kAllCells) {
            auto a = compatible_classes(Evidence::of(c, 1), mono);
            auto b = compatible_classes(Evidence::of(c, 0), mono);
            CHECK(a.size() + b.size() == enumerate_classes(mono).size());
            for (auto g : a) CHECK(std::find(b.begin(), b.end(), g) == b.end());
        }
    }
}

TEST_CASE("parsing and formatting") {
    CHECK(cls("0101").code() == 5);
    CHECK(LatentClass(0, 1, 1, 1).str() == "0111");
    CHECK_THROWS_AS(LatentClass::parse("012"), InputError);
    CHECK_THROWS_AS(LatentClass::parse("0120"), InputError);
    CHECK(Evidence::parse("1,0,1") == Evidence::of(1, 0, 1));
    CHECK(Evidence::parse("empty").empty());
    CHECK(Evidence::of(0, 1, 1).str() == "0,1,1");
    CHECK_THROWS_AS(Evidence::parse("1,1"), InputError);
    CHECK_THROWS_AS(Evidence::parse("1,1,2"), InputError);
    CHECK_THROWS_AS(Evidence::parse("1,1,1,1"), InputError);
}

TEST_CASE("distribution validation") {
    ClassDistribution d;
    d.set(cls("0001"), 0.25);
    d.set(cls("0000"), 0.75);
    CHECK_NOTHROW(d.validate(enumerate_classes(true)));
    d.set(cls("0010"), 0.0);
    CHECK_NOTHROW(d.validate(enumerate_classes(true)));
    d.set(cls("0010"), 0.1);
    CHECK_THROWS_AS(d.validate(enumerate_classes(true)), ContractError);
    ClassDistribution e;
    e.set(cls("0000"), 0.5);
    CHECK_THROWS_AS(e.validate(enumerate_classes(true)), ContractError);
    CHECK(e.entropy() == doctest::Approx(-0.5 * std::log(0.5)));
}

}
