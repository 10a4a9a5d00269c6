#pragma once

#include <map>

#include "causattr/cell_rates.hpp"
#include "causattr/latent_model.hpp"

namespace causattr {

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
    bool point() const { return upper == lower; }
};

// Per-class marginal intervals, canonical class order.
struct IntervalBounds {
    std::map<LatentClass, Interval> classes;

    const Interval& at(LatentClass g) const;
};

// One-parameter family of monotone 6-class distributions consistent with
// the cell rates. The free parameter is t = pi_0001.
struct MonotoneFamily {
    double A = 0.0;  // d11 - d01
    double B = 0.0;  // d11 - d10
    double C = 0.0;  // d11 + d00 - d01 - d10
    double pi0000 = 0.0;
    double pi1111 = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;

    // Distribution at t; t is clamped into [t_lo, t_hi].
    ClassDistribution at(double t) const;
    bool degenerate() const { return t_hi - t_lo <= 0.0; }
};

inline constexpr double kFeasibilitySlack = 1e-9;

// Throws InfeasibleError when the rates contradict monotonicity.
MonotoneFamily monotone_family(const CellRates& d);

IntervalBounds class_bounds_mono(const CellRates& d);

// Marginal posterior intervals over the classes compatible with ev. Throws
// ContractError for empty evidence and InfeasibleError when the evidence
// stratum has probability zero.
IntervalBounds posterior_bounds(const CellRates& d, Evidence ev);

// Conditions a prior on evidence using the supplied stratum mass.
ClassDistribution condition_on_evidence(const ClassDistribution& prior, Evidence ev, double evidence_mass,
                                        bool monotone);

}  // namespace causattr
