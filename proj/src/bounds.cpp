#include "causattr/bounds.hpp"

#include <algorithm>

#include "causattr/errors.hpp"

namespace causattr {

namespace {

constexpr LatentClass k0000{0, 0, 0, 0};
constexpr LatentClass k0001{0, 0, 0, 1};
constexpr LatentClass k0011{0, 0, 1, 1};
constexpr LatentClass k0101{0, 1, 0, 1};
constexpr LatentClass k0111{0, 1, 1, 1};
constexpr LatentClass k1111{1, 1, 1, 1};

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

const Interval& IntervalBounds::at(LatentClass g) const {
    auto it = classes.find(g);
    if (it == classes.end()) throw ContractError("class " + g.str() + " has no interval");
    return it->second;
}

ClassDistribution MonotoneFamily::at(double t) const {
    t = std::clamp(t, t_lo, t_hi);
    ClassDistribution p;
    p.set(k0000, pi0000);
    p.set(k0001, t);
    p.set(k0011, std::max(A - t, 0.0));
    p.set(k0101, std::max(B - t, 0.0));
    p.set(k0111, std::max(t - C, 0.0));
    p.set(k1111, pi1111);
    return p;
}

MonotoneFamily monotone_family(const CellRates& d) {
    for (double x : d.delta) {
        if (!(x >= 0.0 && x <= 1.0)) throw InputError("cell rates must lie in [0, 1]");
    }
    MonotoneFamily f;
    double d00 = d[{0, 0}], d01 = d[{0, 1}], d10 = d[{1, 0}], d11 = d[{1, 1}];
    f.A = d11 - d01;
    f.B = d11 - d10;
    f.C = d11 + d00 - d01 - d10;
    f.pi0000 = 1.0 - d11;
    f.pi1111 = d00;
    double lo = std::max(f.C, 0.0);
    double hi = std::min(f.A, f.B);
    if (f.A < -kFeasibilitySlack || f.B < -kFeasibilitySlack || lo > hi + kFeasibilitySlack) {
        throw InfeasibleError("cell rates are inconsistent with monotonicity");
    }
    // Within the slack, collapse to the single admissible point.
    if (hi < lo) hi = lo = 0.5 * (lo + hi);
    f.t_lo = std::max(lo, 0.0);
    f.t_hi = std::max(hi, f.t_lo);
    return f;
}

IntervalBounds class_bounds_mono(const CellRates& d) {
    MonotoneFamily f = monotone_family(d);
    IntervalBounds b;
    b.classes[k0000] = {f.pi0000, f.pi0000};
    b.classes[k0001] = {f.t_lo, f.t_hi};
    b.classes[k0011] = {clamp01(f.A - f.t_hi), clamp01(f.A - f.t_lo)};
    b.classes[k0101] = {clamp01(f.B - f.t_hi), clamp01(f.B - f.t_lo)};
    b.classes[k0111] = {clamp01(f.t_lo - f.C), clamp01(f.t_hi - f.C)};
    b.classes[k1111] = {f.pi1111, f.pi1111};
    return b;
}

ClassDistribution condition_on_evidence(const ClassDistribution& prior, Evidence ev, double evidence_mass,
                                        bool monotone) {
    if (ev.empty()) throw ContractError("posterior requires non-empty evidence");
    if (!(evidence_mass > 0.0)) {
        throw InfeasibleError("evidence stratum " + ev.str() + " has probability zero; posterior undefined");
    }
    ClassDistribution out;
    for (LatentClass g : compatible_classes(ev, monotone)) out.set(g, prior[g] / evidence_mass);
    return out;
}

IntervalBounds posterior_bounds(const CellRates& d, Evidence ev) {
    if (ev.empty()) throw ContractError("posterior_bounds requires non-empty evidence");
    MonotoneFamily f = monotone_family(d);
    double mass = d.evidence_mass(ev);
    if (!(mass > 0.0)) {
        throw InfeasibleError("evidence stratum " + ev.str() + " has probability zero; posterior undefined");
    }
    // Every class mass is affine in t, so extremes sit at the endpoints.
    ClassDistribution lo = condition_on_evidence(f.at(f.t_lo), ev, mass, true);
    ClassDistribution hi = condition_on_evidence(f.at(f.t_hi), ev, mass, true);
    IntervalBounds b;
    for (const auto& [g, p] : lo) {
        double q = hi[g];
        b.classes[g] = {clamp01(std::min(p, q)), clamp01(std::max(p, q))};
    }
    return b;
}

}  // namespace causattr
