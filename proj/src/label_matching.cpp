#include "causattr/label_matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "causattr/errors.hpp"
#include "causattr/rng.hpp"

namespace causattr {

namespace {

UnivariateMixtureFit run_univariate(const std::vector<double>& x, std::vector<GaussianComponent> comps,
                                    const EmConfig& config, double floor) {
    const std::size_t n = x.size();
    const int k = static_cast<int>(comps.size());
    std::vector<double> buf(k);
    std::vector<double> resp(n * k);
    UnivariateMixtureFit fit;
    double ll_prev = -std::numeric_limits<double>::infinity();
    for (int it = 0; it <= config.max_iter; ++it) {
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (int j = 0; j < k; ++j) {
                buf[j] = std::log(comps[j].weight) + normal_log_density(x[i], comps[j].mean, comps[j].variance);
            }
            double lse = log_sum_exp(buf.data(), k);
            ll += lse;
            for (int j = 0; j < k; ++j) resp[i * k + j] = std::exp(buf[j] - lse);
        }
        fit.iterations = it;
        if (it > 0 && std::abs(ll - ll_prev) < config.rel_tol * std::abs(ll_prev)) {
            fit.converged = true;
            ll_prev = ll;
            break;
        }
        ll_prev = ll;
        if (it == config.max_iter) break;
        for (int j = 0; j < k; ++j) {
            double sw = 0.0, swx = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                sw += resp[i * k + j];
                swx += resp[i * k + j] * x[i];
            }
            if (sw < 1e-8) continue;
            double mean = swx / sw;
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) ss += resp[i * k + j] * (x[i] - mean) * (x[i] - mean);
            comps[j] = {sw / static_cast<double>(n), mean, std::max(ss / sw, floor)};
        }
    }
    fit.loglik = ll_prev;
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.mean < b.mean; });
    fit.components = std::move(comps);
    return fit;
}

double key_of(const StratumFit& f, int j, MatchKey key) {
    const GaussianComponent& c = f.components[j];
    switch (key) {
        case MatchKey::proportion: return c.weight * f.stratum_probability;
        case MatchKey::mean: return c.mean;
        case MatchKey::variance: return c.variance;
    }
    return c.mean;
}

}  // namespace

UnivariateMixtureFit fit_univariate_mixture(const std::vector<double>& sample, int k, const EmConfig& config) {
    if (k < 1) throw ContractError("mixture needs at least one component");
    if (sample.size() < static_cast<std::size_t>(k)) throw ContractError("fewer observations than components");
    std::vector<double> sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double mean = 0.0;
    for (double v : sorted) mean += v / n;
    double var = 0.0;
    for (double v : sorted) var += (v - mean) * (v - mean) / n;
    const double floor = config.variance_floor.value_or(1e-6 * (var > 0.0 ? var : 1.0));

    UnivariateMixtureFit best;
    best.loglik = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < std::max(config.n_starts, 1); ++s) {
        StreamRng rng(config.seed, s);
        std::vector<GaussianComponent> init(k);
        if (s == 0) {
            // evenly spaced quantiles
            for (int j = 0; j < k; ++j) {
                std::size_t idx = std::min(sorted.size() - 1, static_cast<std::size_t>((j + 0.5) / k * n));
                init[j] = {1.0 / k, sorted[idx], std::max(var, floor)};
            }
        } else {
            // k-means++ style seeding
            std::vector<double> d2(sorted.size(), std::numeric_limits<double>::infinity());
            std::size_t pick = std::min(sorted.size() - 1, static_cast<std::size_t>(rng.uniform() * n));
            for (int j = 0; j < k; ++j) {
                if (j > 0) {
                    double total = 0.0;
                    for (double v : d2) total += v;
                    double u = rng.uniform() * total;
                    pick = sorted.size() - 1;
                    for (std::size_t i = 0; i < sorted.size(); ++i) {
                        if ((u -= d2[i]) < 0.0) {
                            pick = i;
                            break;
                        }
                    }
                    if (!(total > 0.0)) pick = std::min(sorted.size() - 1, static_cast<std::size_t>(rng.uniform() * n));
                }
                const double c = sorted[pick];
                for (std::size_t i = 0; i < sorted.size(); ++i) d2[i] = std::min(d2[i], (sorted[i] - c) * (sorted[i] - c));
                init[j] = {1.0 / k, c, std::max(var / (static_cast<double>(k) * k), floor)};
            }
        }
        UnivariateMixtureFit fit = run_univariate(sorted, std::move(init), config, floor);
        if (std::isfinite(fit.loglik) && fit.loglik > best.loglik) best = std::move(fit);
    }
    if (!std::isfinite(best.loglik)) throw ModelError("univariate mixture fit failed");
    return best;
}

LabelAssignment match_class_labels(const std::array<StratumFit, 8>& fits, MatchKey key, double tol, bool monotone) {
    if (!(tol >= 0.0)) throw ContractError("matching tolerance must be nonnegative");
    LabelAssignment out;
    std::array<std::vector<int>, 8> uses;
    for (int e = 0; e < 8; ++e) {
        out.labels[e].assign(fits[e].components.size(), std::nullopt);
        uses[e].assign(fits[e].components.size(), 0);
    }

    for (LatentClass g : enumerate_classes(monotone)) {
        std::array<int, 4> strata;
        for (ExposureCell c : kAllCells) strata[c.index()] = Evidence::of(c, outcome_under(g, c)).index();
        std::array<int, 4> sizes;
        for (int c = 0; c < 4; ++c) sizes[c] = static_cast<int>(fits[strata[c]].components.size());
        if (std::any_of(sizes.begin(), sizes.end(), [](int s) { return s == 0; })) continue;

        std::vector<std::array<int, 4>> hits;
        std::array<int, 4> idx{0, 0, 0, 0};
        while (true) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (int c = 0; c < 4; ++c) {
                double v = key_of(fits[strata[c]], idx[c], key);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo <= tol) hits.push_back(idx);
            int c = 0;
            while (c < 4 && ++idx[c] == sizes[c]) idx[c++] = 0;
            if (c == 4) break;
        }
        if (hits.size() > 1) throw ModelError("ambiguous label matching for class " + g.str());
        if (hits.empty()) continue;
        out.matched_classes.push_back(g);
        for (int c = 0; c < 4; ++c) {
            int e = strata[c], j = hits[0][c];
            if (++uses[e][j] > 1) {
                throw ModelError("ambiguous label matching: component " + std::to_string(j) + " of stratum " +
                                 Evidence::from_index(e).str() + " matches several classes");
            }
            out.labels[e][j] = g;
        }
    }
    for (int e = 0; e < 8; ++e) {
        for (std::size_t j = 0; j < uses[e].size(); ++j) {
            if (uses[e][j] == 0) out.unmatched.emplace_back(e, static_cast<int>(j));
        }
    }
    return out;
}

}  // namespace causattr
