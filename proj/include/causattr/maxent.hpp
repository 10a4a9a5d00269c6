#pragma once

#include "causattr/bounds.hpp"

namespace causattr {

// Entropy-maximizing t over the family's feasible interval.
double maxent_parameter(const MonotoneFamily& f);

// Maximum-entropy monotone class distribution. Throws InfeasibleError when
// the rates contradict monotonicity.
ClassDistribution maxent_mono(const CellRates& d);

// maxent_mono conditioned on evidence, over the compatible classes.
ClassDistribution maxent_posterior(const CellRates& d, Evidence ev);

}  // namespace causattr
