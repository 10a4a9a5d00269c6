#include "causattr/maxent.hpp"

#include "causattr/errors.hpp"

namespace causattr {

double maxent_parameter(const MonotoneFamily& f) {
    if (f.degenerate()) return f.t_lo;
    // Stationary point of H(t): (A - t)(B - t) = t (t - C).
    double denom = f.A + f.B - f.C;
    if (denom > 0.0) {
        double t = f.A * f.B / denom;
        if (t > f.t_lo && t < f.t_hi) return t;
    }
    double h_lo = f.at(f.t_lo).entropy();
    double h_hi = f.at(f.t_hi).entropy();
    return h_hi > h_lo ? f.t_hi : f.t_lo;
}

ClassDistribution maxent_mono(const CellRates& d) {
    MonotoneFamily f = monotone_family(d);
    return f.at(maxent_parameter(f));
}

ClassDistribution maxent_posterior(const CellRates& d, Evidence ev) {
    if (ev.empty()) throw ContractError("maxent_posterior requires non-empty evidence");
    ClassDistribution prior = maxent_mono(d);
    return condition_on_evidence(prior, ev, d.evidence_mass(ev), true);
}

}  // namespace causattr
