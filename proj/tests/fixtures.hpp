#pragma once

#include <cmath>
#include <map>
#include <string>

#include "causattr/cell_rates.hpp"
#include "causattr/latent_model.hpp"

namespace fixture {

using causattr::CellCounts;
using causattr::ClassDistribution;
using causattr::LatentClass;

// Lung cancer counts by smoking (z) and asbestos exposure (m).
inline CellCounts asbestos_counts() {
    CellCounts c;
    c.cells[0] = {6, 5057};
    c.cells[1] = {5, 749};
    c.cells[2] = {118, 12383};
    c.cells[3] = {141, 3130};
    return c;
}

inline constexpr const char* kAsbestosCountsCsv = "z,m,cases,total\n0,0,6,5057\n0,1,5,749\n1,0,118,12383\n1,1,141,3130\n";

inline LatentClass cls(const char* bits) { return LatentClass::parse(bits); }

// Percent values keyed by class bitstring.
inline ClassDistribution percent_dist(const std::map<std::string, double>& pct) {
    ClassDistribution d;
    for (const auto& [k, v] : pct) d.set(LatentClass::parse(k), v / 100.0);
    return d;
}

// Reference class probabilities for the replica analysis, in percent.
inline const std::map<std::string, double> kEmPrior{{"0001", 3.20}, {"0011", 0.64}, {"0101", 0.35},
                                                     {"0111", 0.20}, {"0000", 95.50}, {"1111", 0.12}};
// Posterior given (1,1,1) that the shares example starts from, in percent.
inline const std::map<std::string, double> kEmPosterior111{
    {"0001", 71.01}, {"0011", 14.16}, {"0101", 7.84}, {"0111", 4.35}, {"1111", 2.64}};

}  // namespace fixture

namespace fixture {

// |a - b| <= tol, for absolute tolerances in CHECK(...).
inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace fixture
