#include "causattr/json_io.hpp"

#include <cmath>
#include <fstream>

#include "causattr/errors.hpp"

namespace causattr {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string component_key(ExposureCell c, LatentClass g) {
    return std::to_string(c.z) + "," + std::to_string(c.m) + "," + g.str();
}

Eigen::VectorXd vector_from(const json& j, int dim, const std::string& what) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim) {
        throw InputError(what + " must be an array of " + std::to_string(dim) + " numbers");
    }
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = j.at(i).get<double>();
    return v;
}

}  // namespace

ordered_json to_json(const IntervalBounds& b) {
    ordered_json j = ordered_json::object();
    for (const auto& [g, iv] : b.classes) j[g.str()] = {{"lower", iv.lower}, {"upper", iv.upper}};
    return j;
}

ordered_json to_json(const ClassDistribution& d) {
    ordered_json j = ordered_json::object();
    for (const auto& [g, p] : d) j[g.str()] = p;
    return j;
}

ordered_json to_json(const std::map<std::string, double>& values) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : values) j[k] = v;
    return j;
}

ordered_json to_json(const MixtureModelParams& params) {
    ordered_json j;
    j["monotone"] = params.monotone();
    j["restriction"] = to_string(params.restriction());
    j["dim"] = params.dim();
    ordered_json theta = ordered_json::object();
    for (int k = 0; k < params.n_classes(); ++k) {
        std::vector<double> row;
        for (int c = 0; c < params.dim(); ++c) row.push_back(params.theta()(k, c));
        theta[params.class_at(k).str()] = row;
    }
    j["theta"] = theta;
    ordered_json beta = ordered_json::object();
    for (ExposureCell c : kAllCells) {
        for (int k = 0; k < params.n_classes(); ++k) {
            const ComponentParams& cp = params.component(c, k);
            if (!cp.active) continue;
            beta[component_key(c, params.class_at(k))] = {
                {"mu", std::vector<double>(cp.mu.data(), cp.mu.data() + cp.mu.size())}, {"sigma2", cp.sigma2}};
        }
    }
    j["beta"] = beta;
    return j;
}

ordered_json to_json(const FitResult& fit) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["model"] = to_json(fit.params);
    j["loglik"] = fit.loglik;
    j["aic"] = fit.aic;
    j["n_free_params"] = fit.n_free_params;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["best_start"] = fit.best_start;
    j["variance_floor"] = fit.variance_floor;
    ordered_json starts = ordered_json::array();
    for (double v : fit.start_logliks) starts.push_back(std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr));
    j["start_logliks"] = starts;
    return j;
}

FitResult fit_from_json(const json& j) {
    try {
        const json& m = j.at("model");
        const int dim = m.at("dim").get<int>();
        MixtureModelParams params(m.at("monotone").get<bool>(), parse_restriction(m.at("restriction").get<std::string>()),
                                  dim);
        for (const auto& [key, row] : m.at("theta").items()) {
            int k = params.class_index(LatentClass::parse(key));
            if (k < 0) throw InputError("theta has a class outside the model: " + key);
            params.theta().row(k) = vector_from(row, dim, "theta[" + key + "]").transpose();
        }
        params.theta().row(0).setZero();
        for (const auto& [key, comp] : m.at("beta").items()) {
            if (key.size() != 8 || key[1] != ',' || key[3] != ',') throw InputError("bad component key: " + key);
            ExposureCell c{key[0] - '0', key[2] - '0'};
            if (c.z < 0 || c.z > 1 || c.m < 0 || c.m > 1) throw InputError("bad component key: " + key);
            int k = params.class_index(LatentClass::parse(key.substr(4)));
            if (k < 0) throw InputError("component for a class outside the model: " + key);
            ComponentParams& cp = params.component(c, k);
            cp.mu = vector_from(comp.at("mu"), dim, "beta[" + key + "].mu");
            cp.sigma2 = comp.at("sigma2").get<double>();
            if (!(cp.sigma2 > 0.0)) throw InputError("sigma2 must be positive for " + key);
            cp.active = true;
        }
        FitResult fit;
        fit.params = std::move(params);
        fit.loglik = j.value("loglik", 0.0);
        fit.aic = j.value("aic", 0.0);
        fit.n_free_params = j.value("n_free_params", count_free_params(fit.params));
        fit.iterations = j.value("iterations", 0);
        fit.converged = j.value("converged", false);
        fit.best_start = j.value("best_start", 0);
        fit.variance_floor = j.value("variance_floor", 0.0);
        return fit;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed fit JSON: ") + e.what());
    }
}

FitResult read_fit_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open fit file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("fit file is not valid JSON: " + std::string(e.what()));
    }
    return fit_from_json(j);
}

ordered_json to_json(const BootstrapResult& r) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["replicates"] = r.replicates;
    j["n_failed"] = r.n_failed;
    ordered_json est = ordered_json::object();
    for (const auto& [name, s] : r.estimands) {
        est[name] = {{"point", s.point}, {"se", s.se}, {"ci_low", s.ci_low}, {"ci_high", s.ci_high}, {"mean", s.mean}};
    }
    j["estimands"] = est;
    return j;
}

ordered_json crossings_json(const PosteriorCurve& curve) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["evidence"] = curve.ev.str();
    ordered_json arr = ordered_json::array();
    for (const Crossing& c : curve.crossings) arr.push_back({{"w", c.w}, {"from", c.from.str()}, {"to", c.to.str()}});
    j["crossings"] = arr;
    return j;
}

AttributionMatrix attribution_from_json(const json& j) {
    if (!j.is_object()) throw InputError("attribution shares must be a JSON object keyed by class");
    AttributionMatrix a;
    try {
        for (const auto& [key, row] : j.items()) {
            if (key == "schema_version") continue;
            LatentClass g = LatentClass::parse(key);
            for (const auto& [cause, share] : row.items()) a.shares[g][cause] = share.get<double>();
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed attribution shares: ") + e.what());
    }
    a.validate();
    return a;
}

ordered_json to_json(const AttributionMatrix& a) {
    ordered_json j = ordered_json::object();
    for (const auto& [g, row] : a.shares) {
        ordered_json r = ordered_json::object();
        for (const auto& [cause, s] : row) r[cause] = s;
        j[g.str()] = r;
    }
    return j;
}

}  // namespace causattr
