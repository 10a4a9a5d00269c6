#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "causattr/attribution.hpp"
#include "causattr/bootstrap.hpp"
#include "causattr/bounds.hpp"
#include "causattr/cell_rates.hpp"
#include "causattr/datagen.hpp"
#include "causattr/em.hpp"
#include "causattr/errors.hpp"
#include "causattr/json_io.hpp"
#include "causattr/maxent.hpp"
#include "causattr/pipelines.hpp"
#include "causattr/posterior.hpp"

namespace causattr::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class UsageError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

struct Common {
    std::uint64_t seed = 1;
    std::string format = "json";
    std::string out;
};

// Destination for results: --out file or the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw IoError("cannot open output file: " + path);
        }
        stream_ = file_ ? file_.get() : &fallback;
    }
    std::ostream& stream() { return *stream_; }
    void finish() {
        stream_->flush();
        if (!*stream_) throw IoError("write failed" + (path_.empty() ? std::string() : ": " + path_));
    }

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_ = nullptr;
};

void write_json(std::ostream& os, const ordered_json& j) { os << j.dump(2) << "\n"; }

std::string percent(double p) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << 100.0 * p << "%";
    return s.str();
}

std::string number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void table_distribution(std::ostream& os, const std::string& title, const ClassDistribution& d) {
    os << title << "\n";
    for (const auto& [g, p] : d) os << "  " << g.str() << "  " << std::setw(9) << percent(p) << "\n";
}

void table_bounds(std::ostream& os, const std::string& title, const IntervalBounds& b) {
    os << title << "\n";
    for (const auto& [g, iv] : b.classes) {
        os << "  " << g.str() << "  ";
        if (iv.point())
            os << std::setw(9) << percent(iv.lower) << "\n";
        else
            os << "[" << percent(iv.lower) << ", " << percent(iv.upper) << "]\n";
    }
}

void table_values(std::ostream& os, const std::string& title, const std::map<std::string, double>& v) {
    os << title << "\n";
    for (const auto& [k, p] : v) os << "  " << std::left << std::setw(10) << k << std::right << percent(p) << "\n";
}

Evidence parse_evidence_flag(const std::string& text) {
    try {
        return Evidence::parse(text);
    } catch (const InputError& e) {
        throw UsageError(e.what());
    }
}

// "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw UsageError("config key " + key + " expects true or false, got '" + v + "'");
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw UsageError("config key " + key + " expects a number, got '" + v + "'");
    return out;
}

struct ModelSettings {
    bool monotone = true;
    Restriction restriction = Restriction::none;
    EmConfig em;
};

// Keys: monotonic, restriction, max_iter, rel_tol, n_starts, seed,
// variance_floor, threads.
void apply_config(ModelSettings& s, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, v] : kv) {
        if (key == "monotonic")
            s.monotone = parse_bool(key, v);
        else if (key == "restriction")
            s.restriction = parse_restriction(v);
        else if (key == "max_iter")
            s.em.max_iter = parse_number<int>(key, v);
        else if (key == "rel_tol")
            s.em.rel_tol = parse_number<double>(key, v);
        else if (key == "n_starts")
            s.em.n_starts = parse_number<int>(key, v);
        else if (key == "seed")
            s.em.seed = parse_number<std::uint64_t>(key, v);
        else if (key == "variance_floor")
            s.em.variance_floor = parse_number<double>(key, v);
        else if (key == "threads")
            s.em.threads = parse_number<int>(key, v);
        else
            throw UsageError("unknown config key: " + key);
    }
    if (s.em.max_iter < 1 || s.em.n_starts < 1 || !(s.em.rel_tol > 0.0) || s.em.threads < 0)
        throw UsageError("config values out of range");
    if (s.em.variance_floor && !(*s.em.variance_floor > 0.0)) throw UsageError("variance_floor must be positive");
}

// Flags shared by fit and bootstrap.
struct ModelFlags {
    std::string config;
    std::optional<bool> monotone;
    std::optional<std::string> restriction;
    std::optional<int> starts;
    std::optional<int> threads;

    void add(CLI::App* sub) {
        sub->add_option("--config", config, "Flat key = value file with EM settings");
        sub->add_option("--monotonic", monotone, "Restrict to the six monotone classes (true|false)");
        sub->add_option("--restriction", restriction, "none | shared-means | shared-variances");
        sub->add_option("--starts", starts, "Random EM starts");
        sub->add_option("--threads", threads, "Worker threads (0 = hardware)");
    }

    ModelSettings resolve(const Common& common, bool seed_given) const {
        ModelSettings s;
        if (!config.empty()) apply_config(s, read_config(config));
        if (monotone) s.monotone = *monotone;
        if (restriction) {
            try {
                s.restriction = parse_restriction(*restriction);
            } catch (const InputError& e) {
                throw UsageError(e.what());
            }
        }
        if (starts) {
            if (*starts < 1) throw UsageError("--starts must be positive");
            s.em.n_starts = *starts;
        }
        if (threads) s.em.threads = std::max(0, *threads);
        if (seed_given) s.em.seed = common.seed;
        return s;
    }
};

AttributionMatrix load_shares(const std::string& spec, const std::string& causes) {
    std::string zc = "z", mc = "m";
    if (!causes.empty()) {
        auto comma = causes.find(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 == causes.size())
            throw UsageError("--causes expects two labels: z_label,m_label");
        zc = causes.substr(0, comma);
        mc = causes.substr(comma + 1);
    }
    if (spec == "default") return default_attribution(zc, mc);
    std::ifstream in(spec);
    if (!in) throw IoError("cannot open shares file: " + spec);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("shares file is not valid JSON: " + std::string(e.what()));
    }
    return attribution_from_json(j);
}

ordered_json rates_json(const CellRates& d) {
    ordered_json j = ordered_json::object();
    for (ExposureCell c : kAllCells) j[std::to_string(c.z) + "," + std::to_string(c.m)] = d[c];
    return j;
}

ordered_json monotonicity_json(const MonotonicityReport& r) {
    return {{"consistent", r.consistent}, {"violations", r.violations}};
}

std::vector<Evidence> evidence_cells(const std::string& flag) {
    if (!flag.empty()) {
        Evidence ev = parse_evidence_flag(flag);
        if (ev.empty()) throw UsageError("--evidence must name a stratum z,m,y");
        return {ev};
    }
    auto all = all_evidence();
    return {all.begin(), all.end()};
}

// Infeasible summary data: the report goes to the result stream before exit 2.
int report_infeasible(Sink& sink, const Common& common, const CellRates& d, const InfeasibleError& e,
                      std::ostream& err) {
    MonotonicityReport rep = monotonicity_consistency(d);
    if (common.format == "json") {
        ordered_json j;
        j["schema_version"] = kSchemaVersion;
        j["error"] = "infeasible";
        j["message"] = e.what();
        j["rates"] = rates_json(d);
        j["monotonicity"] = monotonicity_json(rep);
        write_json(sink.stream(), j);
    } else {
        sink.stream() << "infeasible: " << e.what() << "\n";
        for (const auto& v : rep.violations) sink.stream() << "  violated: " << v << "\n";
    }
    sink.finish();
    err << "error: " << e.what() << "\n";
    return kExitModel;
}

int cmd_bounds(const Common& common, const std::string& counts_path, const std::string& evidence,
               std::ostream& out, std::ostream& err) {
    std::vector<Evidence> cells = evidence_cells(evidence);
    CellRates d = rates_from_counts(read_counts_csv_file(counts_path));
    Sink sink(common.out, out);
    MonotoneFamily fam;
    try {
        fam = monotone_family(d);
    } catch (const InfeasibleError& e) {
        return report_infeasible(sink, common, d, e, err);
    }
    IntervalBounds prior = class_bounds_mono(d);
    std::vector<std::pair<Evidence, std::optional<IntervalBounds>>> post;
    for (Evidence ev : cells) {
        if (d.evidence_mass(ev) > 0.0)
            post.emplace_back(ev, posterior_bounds(d, ev));
        else if (!evidence.empty())
            post.emplace_back(ev, posterior_bounds(d, ev));  // throws with the reason
        else
            post.emplace_back(ev, std::nullopt);
    }
    std::ostream& os = sink.stream();
    if (common.format == "json") {
        ordered_json j;
        j["schema_version"] = kSchemaVersion;
        j["rates"] = rates_json(d);
        j["monotonicity"] = monotonicity_json(monotonicity_consistency(d));
        j["family"] = {{"A", fam.A}, {"B", fam.B}, {"C", fam.C}, {"t_lower", fam.t_lo}, {"t_upper", fam.t_hi}};
        j["bounds"] = to_json(prior);
        ordered_json pj = ordered_json::object();
        for (const auto& [ev, b] : post) {
            if (!b) {
                pj[ev.str()] = nullptr;
                continue;
            }
            double mass = d.evidence_mass(ev);
            pj[ev.str()] = {{"bounds", to_json(*b)},
                            {"at_t_lower", to_json(condition_on_evidence(fam.at(fam.t_lo), ev, mass, true))},
                            {"at_t_upper", to_json(condition_on_evidence(fam.at(fam.t_hi), ev, mass, true))}};
        }
        j["posterior_bounds"] = pj;
        write_json(os, j);
    } else if (common.format == "csv") {
        os << "evidence,class,lower,upper\n";
        for (const auto& [g, iv] : prior.classes) os << "empty," << g.str() << "," << number(iv.lower) << "," << number(iv.upper) << "\n";
        for (const auto& [ev, b] : post) {
            if (!b) continue;
            for (const auto& [g, iv] : b->classes)
                os << '"' << ev.str() << "\"," << g.str() << "," << number(iv.lower) << "," << number(iv.upper) << "\n";
        }
    } else {
        table_bounds(os, "class probabilities", prior);
        for (const auto& [ev, b] : post) {
            if (b) table_bounds(os, "given " + ev.str(), *b);
        }
    }
    sink.finish();
    return kExitOk;
}

int cmd_maxent(const Common& common, const std::string& counts_path, const std::string& evidence, std::ostream& out,
               std::ostream& err) {
    std::vector<Evidence> cells = evidence_cells(evidence);
    CellRates d = rates_from_counts(read_counts_csv_file(counts_path));
    Sink sink(common.out, out);
    ClassDistribution pi;
    try {
        pi = maxent_mono(d);
    } catch (const InfeasibleError& e) {
        return report_infeasible(sink, common, d, e, err);
    }
    MonotoneFamily fam = monotone_family(d);
    std::vector<std::pair<Evidence, std::optional<ClassDistribution>>> post;
    for (Evidence ev : cells) {
        if (d.evidence_mass(ev) > 0.0 || !evidence.empty())
            post.emplace_back(ev, maxent_posterior(d, ev));
        else
            post.emplace_back(ev, std::nullopt);
    }
    std::ostream& os = sink.stream();
    if (common.format == "json") {
        ordered_json j;
        j["schema_version"] = kSchemaVersion;
        j["rates"] = rates_json(d);
        j["t"] = maxent_parameter(fam);
        j["degenerate"] = fam.degenerate();
        j["entropy"] = pi.entropy();
        j["distribution"] = to_json(pi);
        ordered_json pj = ordered_json::object();
        for (const auto& [ev, p] : post) pj[ev.str()] = p ? to_json(*p) : ordered_json(nullptr);
        j["posterior"] = pj;
        write_json(os, j);
    } else if (common.format == "csv") {
        os << "evidence,class,probability\n";
        for (const auto& [g, p] : pi) os << "empty," << g.str() << "," << number(p) << "\n";
        for (const auto& [ev, dist] : post) {
            if (!dist) continue;
            for (const auto& [g, p] : *dist) os << '"' << ev.str() << "\"," << g.str() << "," << number(p) << "\n";
        }
    } else {
        table_distribution(os, "maximum entropy class probabilities", pi);
        for (const auto& [ev, dist] : post) {
            if (dist) table_distribution(os, "given " + ev.str(), *dist);
        }
    }
    sink.finish();
    return kExitOk;
}

int cmd_fit(const Common& common, const std::string& data_path, const ModelSettings& s, std::ostream& out) {
    LabeledDataset ld = read_dataset_csv_file(data_path);
    FitResult fit = fit_em(ld.data, s.monotone, s.restriction, s.em);
    ClassDistribution pi = model_posterior(fit.params, Evidence::none(), &ld.data);
    auto sizes = ld.data.stratum_sizes();
    Sink sink(common.out, out);
    std::ostream& os = sink.stream();
    if (common.format == "json") {
        ordered_json j = to_json(fit);
        j["seed"] = s.em.seed;
        j["n_starts"] = s.em.n_starts;
        j["n"] = ld.data.size();
        j["class_probabilities"] = to_json(pi);
        ordered_json pj = ordered_json::object();
        for (Evidence ev : all_evidence())
            pj[ev.str()] = sizes[ev.index()] ? to_json(model_posterior(fit.params, ev, &ld.data)) : ordered_json(nullptr);
        j["posteriors"] = pj;
        write_json(os, j);
    } else if (common.format == "csv") {
        os << "class,probability\n";
        for (const auto& [g, p] : pi) os << g.str() << "," << number(p) << "\n";
    } else {
        os << "model        " << (s.monotone ? "monotone" : "general") << ", " << to_string(s.restriction) << "\n";
        os << "loglik       " << std::fixed << std::setprecision(3) << fit.loglik << "\n";
        os << "aic          " << fit.aic << "\n" << std::defaultfloat;
        os << "free params  " << fit.n_free_params << "\n";
        os << "iterations   " << fit.iterations << (fit.converged ? " (converged)" : " (not converged)") << "\n";
        table_distribution(os, "class probabilities", pi);
    }
    sink.finish();
    return kExitOk;
}

struct CurveSpec {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 0;
};

CurveSpec parse_curve(const std::string& text) {
    CurveSpec c;
    std::istringstream in(text);
    std::string a, b, n;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, n) )
        throw UsageError("--curve expects wmin:wmax:steps");
    try {
        c.lo = std::stod(a);
        c.hi = std::stod(b);
        c.steps = std::stoi(n);
    } catch (const std::exception&) {
        throw UsageError("--curve expects wmin:wmax:steps");
    }
    if (!(c.hi > c.lo) || c.steps < 1) throw UsageError("--curve needs wmin < wmax and steps >= 1");
    return c;
}

// Accepts a fit file or a class distribution, bare or under "posterior"
// or "distribution".
struct AttributeInput {
    std::optional<FitResult> fit;
    ClassDistribution distribution;
};

AttributeInput read_attribute_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("input is not valid JSON: " + std::string(e.what()));
    }
    AttributeInput a;
    if (j.is_object() && j.contains("model")) {
        a.fit = fit_from_json(j);
        return a;
    }
    const json* dj = &j;
    if (j.is_object() && j.contains("posterior")) dj = &j["posterior"];
    else if (j.is_object() && j.contains("distribution")) dj = &j["distribution"];
    if (!dj->is_object()) throw InputError("expected a fit or a class distribution object");
    try {
        for (const auto& [key, v] : dj->items()) {
            if (key == "schema_version") continue;
            double p = v.get<double>();
            if (!(p >= 0.0)) throw InputError("negative probability for class " + key);
            a.distribution.set(LatentClass::parse(key), p);
        }
    } catch (const json::exception& e) {
        throw InputError("malformed class distribution: " + std::string(e.what()));
    }
    if (a.distribution.size() == 0 || std::abs(a.distribution.total() - 1.0) > 1e-3)
        throw InputError("class distribution must sum to 1");
    return a;
}

int cmd_attribute(const Common& common, const std::string& input_path, const std::string& evidence,
                  std::optional<double> w, const std::string& curve, const std::string& shares_spec,
                  const std::string& causes, const std::string& data_path, bool format_given, std::ostream& out) {
    Evidence ev = evidence.empty() ? Evidence::none() : parse_evidence_flag(evidence);
    if (w && !curve.empty()) throw UsageError("--w and --curve are mutually exclusive");
    if ((w || !curve.empty()) && ev.empty()) throw UsageError("--w and --curve need --evidence");
    std::optional<CurveSpec> cs;
    if (!curve.empty()) cs = parse_curve(curve);
    std::optional<AttributionMatrix> shares;
    if (!shares_spec.empty()) shares = load_shares(shares_spec, causes);

    AttributeInput in = read_attribute_input(input_path);
    std::optional<LabeledDataset> data;
    if (!data_path.empty()) data = read_dataset_csv_file(data_path);
    const Dataset* dp = data ? &data->data : nullptr;
    if (!in.fit && (w || cs)) throw UsageError("--w and --curve need a fitted model, not a class distribution");
    if (in.fit && in.fit->params.dim() > 1 && !dp)
        throw UsageError("the model has covariates; pass the fitting data with --data");

    Sink sink(common.out, out);
    std::ostream& os = sink.stream();

    if (cs) {
        PosteriorCurve pc = posterior_curve(in.fit->params, ev, linear_grid(cs->lo, cs->hi, cs->steps), dp);
        if (format_given && common.format == "json") {
            ordered_json j = crossings_json(pc);
            ordered_json pts = ordered_json::array();
            for (std::size_t i = 0; i < pc.grid.size(); ++i) {
                ordered_json row = {{"w", pc.grid[i]}};
                ordered_json probs = ordered_json::object();
                for (std::size_t k = 0; k < pc.classes.size(); ++k) probs[pc.classes[k].str()] = pc.probability[k][i];
                row["probability"] = probs;
                pts.push_back(row);
            }
            j["curve"] = pts;
            write_json(os, j);
        } else {
            os << "w,class,probability\n";
            for (std::size_t i = 0; i < pc.grid.size(); ++i)
                for (std::size_t k = 0; k < pc.classes.size(); ++k)
                    os << number(pc.grid[i]) << "," << pc.classes[k].str() << "," << number(pc.probability[k][i]) << "\n";
            if (!common.out.empty()) {
                std::string side = common.out + ".crossings.json";
                std::ofstream sf(side);
                if (!sf) throw IoError("cannot open output file: " + side);
                write_json(sf, crossings_json(pc));
                if (!sf) throw IoError("write failed: " + side);
            }
        }
        sink.finish();
        return kExitOk;
    }

    ClassDistribution post;
    if (in.fit) {
        if (w)
            post = model_posterior_extended(in.fit->params, ExtendedEvidence{ev, *w}, dp);
        else
            post = model_posterior(in.fit->params, ev, dp);
    } else {
        post = ev.empty() ? in.distribution : posterior_given_evidence(in.distribution, ev);
    }
    std::optional<std::map<std::string, double>> totals;
    if (shares) totals = responsibility_shares(post, *shares);

    if (common.format == "json") {
        ordered_json j;
        j["schema_version"] = kSchemaVersion;
        j["evidence"] = ev.str();
        if (w) j["w"] = *w;
        j["posterior"] = to_json(post);
        if (totals) {
            j["attribution"] = to_json(*shares);
            j["shares"] = to_json(*totals);
        }
        write_json(os, j);
    } else if (common.format == "csv") {
        os << "key,value\n";
        for (const auto& [g, p] : post) os << g.str() << "," << number(p) << "\n";
        if (totals)
            for (const auto& [c, v] : *totals) os << "share." << c << "," << number(v) << "\n";
    } else {
        std::string title = ev.empty() ? "class probabilities" : "given " + ev.str();
        if (w) title += ", w = " + number(*w);
        table_distribution(os, title, post);
        if (totals) table_values(os, "responsibility shares", *totals);
    }
    sink.finish();
    return kExitOk;
}

int cmd_simulate(const Common& common, const std::string& design, std::size_t n, const std::string& error_dist,
                 bool ground_truth, std::ostream& out) {
    LabeledDataset ld;
    if (design == "asbestos") {
        ld = generate_asbestos_replica(common.seed);
    } else {
        if (n < 1) throw UsageError("--n must be positive");
        SimConfig cfg;
        cfg.n = n;
        cfg.seed = common.seed;
        try {
            cfg.error_dist = parse_error_dist(error_dist);
        } catch (const InputError& e) {
            throw UsageError(e.what());
        }
        ld = generate_simulation(cfg);
    }
    Sink sink(common.out, out);
    write_dataset_csv(sink.stream(), ld.data, ground_truth ? &ld.labels : nullptr);
    sink.finish();
    return kExitOk;
}

int cmd_bootstrap(const Common& common, const std::string& data_path, const std::string& pipeline, int replicates,
                  const ModelSettings& s, const std::string& evidence, const std::string& shares_spec,
                  const std::string& causes, std::ostream& out) {
    if (replicates < 2) throw UsageError("-B must be at least 2");
    auto names = pipeline_names();
    if (std::find(names.begin(), names.end(), pipeline) == names.end())
        throw UsageError("unknown pipeline '" + pipeline + "'");
    PipelineOptions opts;
    opts.monotone = s.monotone;
    opts.restriction = s.restriction;
    opts.em = s.em;
    opts.em.threads = 1;
    if (!evidence.empty()) opts.evidence = parse_evidence_flag(evidence);
    opts.shares = load_shares(shares_spec.empty() ? "default" : shares_spec, causes);

    LabeledDataset ld = read_dataset_csv_file(data_path);
    BootstrapConfig bc;
    bc.replicates = replicates;
    bc.seed = common.seed;
    bc.threads = s.em.threads;
    BootstrapResult r = bootstrap(ld.data, make_pipeline(pipeline, opts), bc);

    Sink sink(common.out, out);
    std::ostream& os = sink.stream();
    if (common.format == "json") {
        ordered_json j = to_json(r);
        j["pipeline"] = pipeline;
        j["seed"] = common.seed;
        write_json(os, j);
    } else if (common.format == "csv") {
        os << "estimand,point,se,ci_low,ci_high\n";
        for (const auto& [k, e] : r.estimands)
            os << k << "," << number(e.point) << "," << number(e.se) << "," << number(e.ci_low) << ","
               << number(e.ci_high) << "\n";
    } else {
        os << "replicates " << r.replicates << ", failed " << r.n_failed << "\n";
        for (const auto& [k, e] : r.estimands)
            os << "  " << std::left << std::setw(20) << k << std::right << " " << std::setw(12) << e.point << "  se "
               << std::setw(12) << e.se << "  [" << e.ci_low << ", " << e.ci_high << "]\n";
    }
    sink.finish();
    return kExitOk;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "Random seed");
    sub->add_option("--format", c.format, "json | table | csv")->check(CLI::IsMember({"json", "table", "csv"}));
    sub->add_option("--out", c.out, "Write results to this file");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Attribution of interactive causes of a binary outcome"};
    app.name("causattr");
    app.require_subcommand(1);

    Common common;
    std::string input, evidence, curve, shares, causes, data_path, design = "d4", error_dist = "normal";
    std::string pipeline = "fit+attribute";
    std::optional<double> w;
    std::size_t n = 1000;
    int replicates = 500;
    bool ground_truth = false;
    ModelFlags model;

    auto* bounds = app.add_subcommand("bounds", "Nonparametric bounds from cell counts");
    add_common(bounds, common);
    bounds->add_option("counts", input, "CSV with header z,m,cases,total")->required();
    bounds->add_option("--evidence", evidence, "Stratum z,m,y (default: all)");

    auto* maxent = app.add_subcommand("maxent", "Maximum-entropy class probabilities from cell counts");
    add_common(maxent, common);
    maxent->add_option("counts", input, "CSV with header z,m,cases,total")->required();
    maxent->add_option("--evidence", evidence, "Stratum z,m,y (default: all)");

    auto* fit = app.add_subcommand("fit", "EM fit of the latent-class mixture model");
    add_common(fit, common);
    fit->add_option("data", input, "CSV with header z,m,y,w[,x1,...]")->required();
    model.add(fit);

    auto* attribute = app.add_subcommand("attribute", "Posterior class probabilities and responsibility shares");
    add_common(attribute, common);
    attribute->add_option("input", input, "Fit JSON or class distribution JSON")->required();
    attribute->add_option("--evidence", evidence, "Stratum z,m,y");
    attribute->add_option("--w", w, "Secondary outcome value");
    attribute->add_option("--curve", curve, "Posterior curve over wmin:wmax:steps (CSV unless --format json)");
    attribute->add_option("--shares", shares, "Attribution matrix JSON, or 'default'");
    attribute->add_option("--causes", causes, "Cause labels for the default matrix: z_label,m_label");
    attribute->add_option("--data", data_path, "Fitting data, required for covariate models");

    auto* simulate = app.add_subcommand("simulate", "Synthetic data");
    add_common(simulate, common);
    simulate->add_option("--design", design, "d4 | asbestos")->check(CLI::IsMember({"d4", "asbestos"}));
    simulate->add_option("--n", n, "Sample size for d4");
    simulate->add_option("--error-dist", error_dist, "normal | t5 | uniform | bernoulli | gamma");
    simulate->add_flag("--ground-truth", ground_truth, "Append the latent class column g");

    auto* boot = app.add_subcommand("bootstrap", "Percentile bootstrap intervals");
    add_common(boot, common);
    boot->add_option("data", input, "CSV with header z,m,y,w[,x1,...]")->required();
    boot->add_option("--pipeline", pipeline, "constant | mean-w | maxent | fit+attribute");
    boot->add_option("-B,--replicates", replicates, "Bootstrap replicates");
    boot->add_option("--evidence", evidence, "Stratum for posterior and shares (default 1,1,1)");
    boot->add_option("--shares", shares, "Attribution matrix JSON, or 'default'");
    boot->add_option("--causes", causes, "Cause labels for the default matrix: z_label,m_label");
    model.add(boot);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (bounds->parsed()) return cmd_bounds(common, input, evidence, out, err);
        if (maxent->parsed()) return cmd_maxent(common, input, evidence, out, err);
        if (fit->parsed())
            return cmd_fit(common, input, model.resolve(common, fit->count("--seed") > 0), out);
        if (attribute->parsed())
            return cmd_attribute(common, input, evidence, w, curve, shares, causes, data_path,
                                 attribute->count("--format") > 0, out);
        if (simulate->parsed()) return cmd_simulate(common, design, n, error_dist, ground_truth, out);
        if (boot->parsed()) {
            ModelSettings s = model.resolve(common, false);
            return cmd_bootstrap(common, input, pipeline, replicates, s, evidence, shares, causes, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InfeasibleError& e) {
        err << "error: infeasible: " << e.what() << "\n";
        return kExitModel;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << "\n";
        return kExitModel;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    err << "error: no command\n";
    return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace causattr::cli
