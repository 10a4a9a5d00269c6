#include "causattr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "causattr/errors.hpp"

namespace causattr {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t row) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InputError("row " + std::to_string(row) + ": cannot parse number '" + s + "'");
    }
    return v;
}

int parse_binary(const std::string& s, std::size_t row, const char* name) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw InputError("row " + std::to_string(row) + ": " + name + " must be 0 or 1, got '" + s + "'");
}

void put_double(std::ostream& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
}

}  // namespace

Dataset::Dataset(std::vector<UnitRecord> records) : records_(std::move(records)) {
    if (records_.empty()) return;
    std::size_t p = records_.front().x.size();
    if (p == 0) throw InputError("covariate vectors must include the intercept");
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const UnitRecord& r = records_[i];
        if ((r.z != 0 && r.z != 1) || (r.m != 0 && r.m != 1) || (r.y != 0 && r.y != 1)) {
            throw InputError("unit " + std::to_string(i) + ": z, m, y must be binary");
        }
        if (!std::isfinite(r.w)) throw InputError("unit " + std::to_string(i) + ": w must be finite");
        if (r.x.size() != p) throw InputError("unit " + std::to_string(i) + ": covariate dimension mismatch");
        if (r.x[0] != 1.0) throw InputError("unit " + std::to_string(i) + ": first covariate must be the intercept 1");
        for (double v : r.x) {
            if (!std::isfinite(v)) throw InputError("unit " + std::to_string(i) + ": covariates must be finite");
        }
    }
}

Eigen::MatrixXd Dataset::design() const {
    Eigen::MatrixXd X(size(), dim());
    for (std::size_t i = 0; i < size(); ++i) {
        for (int j = 0; j < dim(); ++j) X(i, j) = records_[i].x[j];
    }
    return X;
}

Eigen::VectorXd Dataset::w() const {
    Eigen::VectorXd v(size());
    for (std::size_t i = 0; i < size(); ++i) v(i) = records_[i].w;
    return v;
}

std::array<std::size_t, 8> Dataset::stratum_sizes() const {
    std::array<std::size_t, 8> n{};
    for (const auto& r : records_) ++n[r.evidence().index()];
    return n;
}

CellCounts Dataset::counts() const {
    CellCounts c;
    for (const auto& r : records_) {
        ++c[r.cell()].total;
        c[r.cell()].cases += r.y;
    }
    return c;
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    std::vector<UnitRecord> out;
    out.reserve(rows.size());
    for (std::size_t i : rows) out.push_back(records_.at(i));
    Dataset d;
    d.records_ = std::move(out);
    return d;
}

LabeledDataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("dataset CSV is empty");
    auto header = split_fields(line);
    const std::vector<std::string> required{"z", "m", "y", "w"};
    if (header.size() < 4 || !std::equal(required.begin(), required.end(), header.begin())) {
        throw InputError("dataset CSV header must start with 'z,m,y,w'");
    }
    bool has_labels = header.back() == "g";
    std::size_t n_cov = header.size() - 4 - (has_labels ? 1 : 0);
    for (std::size_t j = 0; j < n_cov; ++j) {
        if (header[4 + j] != "x" + std::to_string(j + 1)) {
            throw InputError("dataset CSV covariate columns must be named x1..xk in order");
        }
    }

    std::vector<UnitRecord> records;
    std::vector<LatentClass> labels;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto f = split_fields(line);
        if (f.size() != header.size()) {
            throw InputError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                             " fields, got " + std::to_string(f.size()));
        }
        UnitRecord r;
        r.z = parse_binary(f[0], row, "z");
        r.m = parse_binary(f[1], row, "m");
        r.y = parse_binary(f[2], row, "y");
        r.w = parse_double(f[3], row);
        r.x.reserve(n_cov + 1);
        r.x.push_back(1.0);
        for (std::size_t j = 0; j < n_cov; ++j) r.x.push_back(parse_double(f[4 + j], row));
        if (has_labels) labels.push_back(LatentClass::parse(f.back()));
        records.push_back(std::move(r));
    }
    if (records.empty()) throw InputError("dataset CSV has no rows");
    return {Dataset(std::move(records)), std::move(labels)};
}

LabeledDataset read_dataset_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open dataset file: " + path);
    return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data, const std::vector<LatentClass>* labels) {
    if (labels && labels->size() != data.size()) throw ContractError("one label per unit required");
    out << "z,m,y,w";
    for (int j = 1; j < data.dim(); ++j) out << ",x" << j;
    if (labels) out << ",g";
    out << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        const UnitRecord& r = data[i];
        out << r.z << ',' << r.m << ',' << r.y << ',';
        put_double(out, r.w);
        for (std::size_t j = 1; j < r.x.size(); ++j) {
            out << ',';
            put_double(out, r.x[j]);
        }
        if (labels) out << ',' << (*labels)[i].str();
        out << '\n';
    }
}

}  // namespace causattr
