#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "causattr/latent_model.hpp"

namespace causattr {

struct CellCount {
    std::int64_t cases = 0;  // units with Y = 1
    std::int64_t total = 0;
};

// Aggregate counts per exposure cell, indexed by ExposureCell::index().
struct CellCounts {
    std::array<CellCount, 4> cells{};

    CellCount& operator[](ExposureCell c) { return cells[c.index()]; }
    const CellCount& operator[](ExposureCell c) const { return cells[c.index()]; }
};

// delta_{z,m} = pr(Y = 1 | Z = z, M = m).
struct CellRates {
    std::array<double, 4> delta{};

    CellRates() = default;
    // Order (0,0), (0,1), (1,0), (1,1).
    CellRates(double d00, double d01, double d10, double d11) : delta{d00, d01, d10, d11} {}

    double operator[](ExposureCell c) const { return delta[c.index()]; }
    double& operator[](ExposureCell c) { return delta[c.index()]; }

    // Probability of the evidence stratum: delta for y = 1, 1 - delta for y = 0.
    double evidence_mass(Evidence ev) const;
};

// Throws InputError for cases outside [0, total] or a non-positive total.
CellRates rates_from_counts(const CellCounts& counts);

struct IdentifiedMasses {
    double pi0000 = 0.0;  // 1 - delta_11
    double pi1111 = 0.0;  // delta_00
};

IdentifiedMasses identified_masses(const CellRates& d);

struct MonotonicityReport {
    bool consistent = true;
    std::vector<std::string> violations;  // e.g. "delta00 <= delta01"
};

// Observable implications of monotonicity: d00 <= d01 <= d11, d00 <= d10 <= d11.
// Advisory only.
MonotonicityReport monotonicity_consistency(const CellRates& d);

// Four-row CSV with header "z,m,cases,total".
CellCounts read_counts_csv(std::istream& in);
CellCounts read_counts_csv_file(const std::string& path);

}  // namespace causattr
