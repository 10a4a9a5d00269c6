#include "causattr/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "causattr/errors.hpp"
#include "causattr/rng.hpp"

namespace causattr {

namespace {

constexpr double kNegligibleWeight = 1e-8;
constexpr int kThetaMaxIter = 100;
constexpr double kThetaGradTol = 1e-10;

// Dataset in the layout the EM loops want: design rows grouped by distinct
// covariate vector so class priors are evaluated once per group.
struct Prepared {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> X;
    Eigen::VectorXd w;
    std::vector<int> ev;
    std::vector<int> group;
    Eigen::MatrixXd Xg;
    std::array<std::vector<int>, 8> by_stratum;
};

Prepared prepare(const Dataset& data) {
    if (data.empty()) throw ContractError("dataset is empty");
    Prepared p;
    p.X = data.design();
    p.w = data.w();
    const std::size_t n = data.size();
    p.ev.resize(n);
    p.group.resize(n);
    std::map<std::vector<double>, int> groups;
    std::vector<std::size_t> first_row;
    for (std::size_t i = 0; i < n; ++i) {
        p.ev[i] = data[i].evidence().index();
        p.by_stratum[p.ev[i]].push_back(static_cast<int>(i));
        auto [it, inserted] = groups.emplace(data[i].x, static_cast<int>(groups.size()));
        if (inserted) first_row.push_back(i);
        p.group[i] = it->second;
    }
    p.Xg.resize(first_row.size(), p.X.cols());
    for (std::size_t g = 0; g < first_row.size(); ++g) p.Xg.row(g) = p.X.row(first_row[g]);
    return p;
}

void check_shape(const MixtureModelParams& params, const Prepared& p) {
    if (params.dim() != p.X.cols()) throw ContractError("model dimension does not match the dataset");
}

Eigen::MatrixXd group_log_priors(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& Xg) {
    Eigen::MatrixXd LP(theta.rows(), Xg.rows());
    for (Eigen::Index g = 0; g < Xg.rows(); ++g) log_class_prior(theta, Xg.row(g).transpose(), LP.col(g));
    return LP;
}

// Fills resp (when non-null) and returns the observed-data log-likelihood.
double expectation(const MixtureModelParams& params, const Prepared& p, Eigen::MatrixXd* resp) {
    check_shape(params, p);
    const int K = params.n_classes();
    const Eigen::Index n = p.X.rows();
    Eigen::MatrixXd LP = group_log_priors(params.theta(), p.Xg);
    if (resp) resp->setZero(n, K);
    std::vector<double> buf(K);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int e = p.ev[i];
        const ExposureCell cell = Evidence::from_index(e).cell();
        const auto& comp = params.compatible(e);
        const int nc = static_cast<int>(comp.size());
        for (int j = 0; j < nc; ++j) {
            const ComponentParams& cp = params.component(cell, comp[j]);
            buf[j] = LP(comp[j], p.group[i]) + normal_log_density(p.w(i), p.X.row(i).dot(cp.mu), cp.sigma2);
        }
        double lse = log_sum_exp(buf.data(), nc);
        if (!std::isfinite(lse)) throw ModelError("mixture density underflow at unit " + std::to_string(i));
        ll += lse;
        if (resp) {
            if (nc == 1) {
                (*resp)(i, comp[0]) = 1.0;
            } else {
                for (int j = 0; j < nc; ++j) (*resp)(i, comp[j]) = std::exp(buf[j] - lse);
            }
        }
    }
    return ll;
}

double theta_objective(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& Rg, const Eigen::MatrixXd& Xg) {
    Eigen::MatrixXd LP = group_log_priors(theta, Xg);
    double obj = 0.0;
    for (Eigen::Index g = 0; g < Xg.rows(); ++g) {
        for (Eigen::Index k = 0; k < theta.rows(); ++k) {
            if (Rg(g, k) > 0.0) obj += Rg(g, k) * LP(k, g);
        }
    }
    return obj;
}

Eigen::MatrixXd fit_theta(const Eigen::MatrixXd& R, const Prepared& p, Eigen::MatrixXd theta, ThetaFitInfo* info) {
    const int K = static_cast<int>(R.cols());
    const int dim = static_cast<int>(p.X.cols());
    const int G = static_cast<int>(p.Xg.rows());
    if (theta.size() == 0) theta = Eigen::MatrixXd::Zero(K, dim);
    if (theta.rows() != K || theta.cols() != dim) throw ContractError("theta has the wrong shape");
    theta.row(0).setZero();

    Eigen::MatrixXd Rg = Eigen::MatrixXd::Zero(G, K);
    for (Eigen::Index i = 0; i < R.rows(); ++i) Rg.row(p.group[i]) += R.row(i);
    Eigen::VectorXd ng = Rg.rowwise().sum();
    const double total = std::max(ng.sum(), 1e-300);

    const int d = (K - 1) * dim;
    ThetaFitInfo local;
    double obj = theta_objective(theta, Rg, p.Xg);
    Eigen::VectorXd grad(d);
    Eigen::MatrixXd H(d, d);
    Eigen::VectorXd c(G);
    for (int it = 0; it <= kThetaMaxIter; ++it) {
        const Eigen::MatrixXd P = group_log_priors(theta, p.Xg).array().exp();  // K x G
        const Eigen::MatrixXd resid = Rg.transpose() - P * ng.asDiagonal();     // K x G
        const Eigen::MatrixXd G_full = resid * p.Xg;                           // K x p
        for (int k = 1; k < K; ++k) grad.segment((k - 1) * dim, dim) = G_full.row(k).transpose();
        for (int k = 1; k < K; ++k) {
            for (int l = k; l < K; ++l) {
                c = -ng.cwiseProduct(P.row(k).cwiseProduct(P.row(l)).transpose());
                if (k == l) c += ng.cwiseProduct(P.row(k).transpose());
                Eigen::MatrixXd block = p.Xg.transpose() * c.asDiagonal() * p.Xg;
                H.block((k - 1) * dim, (l - 1) * dim, dim, dim) = block;
                if (l != k) H.block((l - 1) * dim, (k - 1) * dim, dim, dim) = block.transpose();
            }
        }
        local.gradient_norm = grad.cwiseAbs().maxCoeff() / total;
        local.iterations = it;
        if (local.gradient_norm < kThetaGradTol) {
            local.converged = true;
            break;
        }
        if (it == kThetaMaxIter) break;

        H.diagonal().array() += 1e-12 * std::max(H.diagonal().maxCoeff(), 1.0);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        Eigen::VectorXd step = ldlt.solve(grad);
        if (ldlt.info() != Eigen::Success || !step.allFinite()) step = grad / total;
        // Newton decrement below the objective's rounding level: nothing left to gain.
        if (0.5 * grad.dot(step) <= 1e-13 * std::max(1.0, std::abs(obj))) {
            local.converged = true;
            break;
        }

        Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(K, dim);
        for (int k = 1; k < K; ++k) delta.row(k) = step.segment((k - 1) * dim, dim).transpose();
        double t = 1.0;
        bool improved = false;
        for (int h = 0; h < 40; ++h, t *= 0.5) {
            Eigen::MatrixXd cand = theta + t * delta;
            double cand_obj = theta_objective(cand, Rg, p.Xg);
            if (std::isfinite(cand_obj) && cand_obj >= obj) {
                theta = std::move(cand);
                obj = cand_obj;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (info) *info = local;
    return theta;
}

Eigen::VectorXd solve_normal_equations(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, ExposureCell c,
                                       LatentClass g) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(1e-12);
    if (lu.rank() < A.rows()) {
        throw ModelError("rank-deficient design for component (" + std::to_string(c.z) + "," +
                         std::to_string(c.m) + "," + g.str() + ")");
    }
    return lu.solve(b);
}

void update_beta(const Eigen::MatrixXd& R, const Prepared& p, MixtureModelParams& params, double floor) {
    check_shape(params, p);
    const int K = params.n_classes();
    const int dim = params.dim();
    if (R.rows() != p.X.rows() || R.cols() != K) throw ContractError("responsibilities have the wrong shape");

    struct Moments {
        Eigen::MatrixXd A;
        Eigen::VectorXd b;
        double weight = 0.0;
        const std::vector<int>* rows = nullptr;
    };

    auto residual_ss = [&](const std::vector<int>& rows, int k, const Eigen::VectorXd& mu) {
        double ss = 0.0;
        for (int i : rows) {
            double r = p.w(i) - p.X.row(i).dot(mu);
            ss += R(i, k) * r * r;
        }
        return ss;
    };

    for (int k = 0; k < K; ++k) {
        const LatentClass g = params.class_at(k);
        std::array<Moments, 4> mom;
        for (ExposureCell c : kAllCells) {
            if (!params.component(c, k).active) continue;
            Moments& m = mom[c.index()];
            m.rows = &p.by_stratum[Evidence::of(c, outcome_under(g, c)).index()];
            m.A = Eigen::MatrixXd::Zero(dim, dim);
            m.b = Eigen::VectorXd::Zero(dim);
            for (int i : *m.rows) {
                const double r = R(i, k);
                if (r == 0.0) continue;
                const double* x = p.X.row(i).data();
                for (int a = 0; a < dim; ++a) {
                    m.b(a) += r * p.w(i) * x[a];
                    for (int b = 0; b <= a; ++b) m.A(a, b) += r * x[a] * x[b];
                }
                m.weight += r;
            }
            m.A.triangularView<Eigen::StrictlyUpper>() = m.A.transpose();
        }
        auto usable = [&](ExposureCell c) {
            return params.component(c, k).active && mom[c.index()].weight >= kNegligibleWeight;
        };

        switch (params.restriction()) {
            case Restriction::none: {
                for (ExposureCell c : kAllCells) {
                    if (!usable(c)) continue;
                    const Moments& m = mom[c.index()];
                    ComponentParams& cp = params.component(c, k);
                    cp.mu = solve_normal_equations(m.A, m.b, c, g);
                    cp.sigma2 = std::max(residual_ss(*m.rows, k, cp.mu) / m.weight, floor);
                }
                break;
            }
            case Restriction::shared_variances: {
                double ss = 0.0, wt = 0.0;
                for (ExposureCell c : kAllCells) {
                    if (!usable(c)) continue;
                    const Moments& m = mom[c.index()];
                    ComponentParams& cp = params.component(c, k);
                    cp.mu = solve_normal_equations(m.A, m.b, c, g);
                    ss += residual_ss(*m.rows, k, cp.mu);
                    wt += m.weight;
                }
                if (wt < kNegligibleWeight) break;
                const double s2 = std::max(ss / wt, floor);
                for (ExposureCell c : kAllCells) {
                    if (params.component(c, k).active) params.component(c, k).sigma2 = s2;
                }
                break;
            }
            case Restriction::shared_means: {
                // Conditional maximization: means given the current variances, then variances.
                Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
                Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
                bool any = false;
                ExposureCell first{};
                for (ExposureCell c : kAllCells) {
                    if (!usable(c)) continue;
                    const double inv = 1.0 / params.component(c, k).sigma2;
                    A += inv * mom[c.index()].A;
                    b += inv * mom[c.index()].b;
                    if (!any) first = c;
                    any = true;
                }
                if (!any) break;
                const Eigen::VectorXd mu = solve_normal_equations(A, b, first, g);
                for (ExposureCell c : kAllCells) {
                    ComponentParams& cp = params.component(c, k);
                    if (!cp.active) continue;
                    cp.mu = mu;
                    if (usable(c)) cp.sigma2 = std::max(residual_ss(*mom[c.index()].rows, k, mu) / mom[c.index()].weight, floor);
                }
                break;
            }
        }
    }
}

void activate(MixtureModelParams& params, const std::array<std::size_t, 8>& sizes) {
    for (int k = 0; k < params.n_classes(); ++k) {
        for (ExposureCell c : kAllCells) {
            Evidence ev = Evidence::of(c, outcome_under(params.class_at(k), c));
            params.component(c, k).active = sizes[ev.index()] > 0;
        }
    }
}

double variance(const Eigen::VectorXd& v) {
    if (v.size() < 2) return 0.0;
    double mean = v.mean();
    return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

MixtureModelParams random_start(const Prepared& p, bool monotone, Restriction restriction, double floor,
                                StreamRng rng) {
    MixtureModelParams params(monotone, restriction, static_cast<int>(p.X.cols()));
    std::array<std::size_t, 8> sizes{};
    for (int e = 0; e < 8; ++e) sizes[e] = p.by_stratum[e].size();
    activate(params, sizes);

    const int K = params.n_classes();
    for (int k = 1; k < K; ++k) {
        for (int j = 0; j < params.dim(); ++j) params.theta()(k, j) = 0.2 * rng.uniform() - 0.1;
    }

    std::array<std::vector<double>, 8> sorted_w;
    std::array<double, 8> stratum_var{};
    const double total_var = std::max(variance(p.w), floor);
    for (int e = 0; e < 8; ++e) {
        for (int i : p.by_stratum[e]) sorted_w[e].push_back(p.w(i));
        std::sort(sorted_w[e].begin(), sorted_w[e].end());
        Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(sorted_w[e].data(), sorted_w[e].size());
        double s2 = variance(v);
        stratum_var[e] = s2 > floor ? s2 : total_var;
    }
    auto draw_quantile = [&](int e) {
        const auto& ws = sorted_w[e];
        std::size_t idx = std::min(ws.size() - 1, static_cast<std::size_t>(rng.uniform() * ws.size()));
        return ws[idx];
    };

    for (int k = 0; k < K; ++k) {
        const LatentClass g = params.class_at(k);
        double shared_mean = std::numeric_limits<double>::quiet_NaN();
        for (ExposureCell c : kAllCells) {
            ComponentParams& cp = params.component(c, k);
            if (!cp.active) continue;
            const int e = Evidence::of(c, outcome_under(g, c)).index();
            double mean = draw_quantile(e);
            if (restriction == Restriction::shared_means) {
                if (std::isnan(shared_mean)) shared_mean = mean;
                mean = shared_mean;
            }
            cp.mu.setZero();
            cp.mu(0) = mean;
            cp.sigma2 = stratum_var[e];
        }
        if (restriction == Restriction::shared_variances) {
            double s2 = 0.0;
            int n = 0;
            for (ExposureCell c : kAllCells) {
                if (params.component(c, k).active) {
                    s2 += params.component(c, k).sigma2;
                    ++n;
                }
            }
            for (ExposureCell c : kAllCells) {
                if (params.component(c, k).active) params.component(c, k).sigma2 = s2 / n;
            }
        }
    }
    return params;
}

FitResult run_prepared(const Prepared& p, MixtureModelParams params, const EmConfig& config, double floor) {
    FitResult out;
    Eigen::MatrixXd R;
    double ll_prev = expectation(params, p, &R);
    out.trace.push_back(ll_prev);
    for (int it = 1; it <= config.max_iter; ++it) {
        ThetaFitInfo info;
        params.theta() = fit_theta(R, p, params.theta(), &info);
        if (!info.converged) ++out.theta_unconverged;
        update_beta(R, p, params, floor);
        double ll = expectation(params, p, &R);
        out.trace.push_back(ll);
        out.iterations = it;
        if (std::abs(ll - ll_prev) < config.rel_tol * std::abs(ll_prev)) {
            out.converged = true;
            ll_prev = ll;
            break;
        }
        ll_prev = ll;
    }
    out.loglik = ll_prev;
    out.variance_floor = floor;
    out.params = std::move(params);
    out.n_free_params = count_free_params(out.params);
    out.aic = aic(out.loglik, out.n_free_params);
    return out;
}

}  // namespace

Responsibilities e_step(const MixtureModelParams& params, const Dataset& data) {
    Prepared p = prepare(data);
    Eigen::MatrixXd R;
    expectation(params, p, &R);
    return R;
}

Eigen::MatrixXd m_step_theta(const Responsibilities& resp, const Dataset& data, const Eigen::MatrixXd& theta_init,
                             ThetaFitInfo* info) {
    Prepared p = prepare(data);
    if (resp.rows() != p.X.rows() || resp.cols() < 2) throw ContractError("responsibilities have the wrong shape");
    return fit_theta(resp, p, theta_init, info);
}

void m_step_beta(const Responsibilities& resp, const Dataset& data, MixtureModelParams& params,
                 double variance_floor) {
    Prepared p = prepare(data);
    update_beta(resp, p, params, variance_floor);
}

double log_likelihood(const MixtureModelParams& params, const Dataset& data) {
    return expectation(params, prepare(data), nullptr);
}

void activate_components(MixtureModelParams& params, const Dataset& data) { activate(params, data.stratum_sizes()); }

int count_free_params(const MixtureModelParams& params) {
    const int K = params.n_classes();
    const int dim = params.dim();
    int k_params = (K - 1) * dim;
    for (int k = 0; k < K; ++k) {
        int active = 0;
        for (ExposureCell c : kAllCells) active += params.component(c, k).active ? 1 : 0;
        if (active == 0) continue;
        switch (params.restriction()) {
            case Restriction::none: k_params += active * (dim + 1); break;
            case Restriction::shared_means: k_params += dim + active; break;
            case Restriction::shared_variances: k_params += active * dim + 1; break;
        }
    }
    return k_params;
}

double aic(double loglik, int n_free_params) { return 2.0 * n_free_params - 2.0 * loglik; }

double aic(const FitResult& fit) { return aic(fit.loglik, fit.n_free_params); }

double default_variance_floor(const Dataset& data) {
    double v = variance(data.w());
    return 1e-6 * (v > 0.0 ? v : 1.0);
}

FitResult run_em(const Dataset& data, MixtureModelParams init, const EmConfig& config) {
    Prepared p = prepare(data);
    double floor = config.variance_floor.value_or(default_variance_floor(data));
    return run_prepared(p, std::move(init), config, floor);
}

FitResult fit_em(const Dataset& data, bool monotone, Restriction restriction, const EmConfig& config) {
    if (config.n_starts < 1) throw ContractError("n_starts must be at least 1");
    if (config.max_iter < 1) throw ContractError("max_iter must be at least 1");
    const Prepared p = prepare(data);
    const double floor = config.variance_floor.value_or(default_variance_floor(data));

    std::vector<std::optional<FitResult>> results(config.n_starts);
    auto run_start = [&](int s) {
        try {
            MixtureModelParams init = random_start(p, monotone, restriction, floor, StreamRng(config.seed, s));
            FitResult r = run_prepared(p, std::move(init), config, floor);
            if (std::isfinite(r.loglik)) results[s] = std::move(r);
        } catch (const ModelError&) {
        }
    };

    int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, config.n_starts);
    if (threads == 1) {
        for (int s = 0; s < config.n_starts; ++s) run_start(s);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (int s = t; s < config.n_starts; s += threads) run_start(s);
            });
        }
        for (auto& th : pool) th.join();
    }

    int best = -1;
    std::vector<double> lls(config.n_starts, std::numeric_limits<double>::quiet_NaN());
    for (int s = 0; s < config.n_starts; ++s) {
        if (!results[s]) continue;
        lls[s] = results[s]->loglik;
        if (best < 0 || results[s]->loglik > results[best]->loglik) best = s;
    }
    if (best < 0) throw ModelError("EM failed: no start produced a finite log-likelihood");
    FitResult out = std::move(*results[best]);
    out.best_start = best;
    out.start_logliks = std::move(lls);
    return out;
}

}  // namespace causattr
