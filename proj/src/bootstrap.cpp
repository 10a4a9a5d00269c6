#include "causattr/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

#include "causattr/errors.hpp"
#include "causattr/rng.hpp"

namespace causattr {

double sample_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ContractError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    double pos = q * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

BootstrapResult bootstrap(const Dataset& data, const Estimator& estimator, const BootstrapConfig& config) {
    if (config.replicates < 2) throw ContractError("bootstrap needs at least 2 replicates");
    if (data.empty()) throw ContractError("bootstrap needs a nonempty dataset");
    const Estimates point = estimator(data);
    const std::size_t n = data.size();

    std::vector<std::optional<Estimates>> reps(config.replicates);
    auto run = [&](int b) {
        StreamRng rng(config.seed, static_cast<std::uint64_t>(b));
        std::vector<std::size_t> rows(n);
        for (auto& r : rows) r = static_cast<std::size_t>(rng.uniform() * n) % n;
        try {
            reps[b] = estimator(data.subset(rows));
        } catch (const Error&) {
        }
    };
    int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, config.replicates);
    if (threads == 1) {
        for (int b = 0; b < config.replicates; ++b) run(b);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (int b = t; b < config.replicates; b += threads) run(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    BootstrapResult out;
    out.replicates = config.replicates;
    for (const auto& r : reps) out.n_failed += r ? 0 : 1;
    if (out.n_failed > config.max_failure_fraction * config.replicates) {
        throw ModelError("bootstrap unstable: " + std::to_string(out.n_failed) + " of " +
                         std::to_string(config.replicates) + " replicates failed");
    }
    for (const auto& [name, value] : point) {
        std::vector<double> vals;
        for (const auto& r : reps) {
            if (!r) continue;
            auto it = r->find(name);
            if (it != r->end() && std::isfinite(it->second)) vals.push_back(it->second);
        }
        EstimandSummary s;
        s.point = value;
        if (vals.size() >= 2) {
            double mean = 0.0;
            for (double v : vals) mean += v;
            mean /= static_cast<double>(vals.size());
            double ss = 0.0;
            for (double v : vals) ss += (v - mean) * (v - mean);
            s.mean = mean;
            s.se = std::sqrt(ss / static_cast<double>(vals.size() - 1));
            s.ci_low = sample_quantile(vals, 0.025);
            s.ci_high = sample_quantile(vals, 0.975);
        } else {
            s.mean = s.ci_low = s.ci_high = value;
        }
        out.estimands[name] = s;
    }
    return out;
}

}  // namespace causattr
