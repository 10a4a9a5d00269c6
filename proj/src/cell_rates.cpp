#include "causattr/cell_rates.hpp"

#include <fstream>
#include <sstream>

#include "causattr/errors.hpp"

namespace causattr {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

double CellRates::evidence_mass(Evidence ev) const {
    if (ev.empty()) return 1.0;
    double d = (*this)[ev.cell()];
    return ev.y() == 1 ? d : 1.0 - d;
}

CellRates rates_from_counts(const CellCounts& counts) {
    CellRates out;
    for (ExposureCell c : kAllCells) {
        const CellCount& cc = counts[c];
        if (cc.total <= 0) {
            throw InputError("insufficient data: exposure cell (" + std::to_string(c.z) + "," +
                             std::to_string(c.m) + ") has no units");
        }
        if (cc.cases < 0 || cc.cases > cc.total) {
            throw InputError("cases must lie in [0, total] for every exposure cell");
        }
        out[c] = static_cast<double>(cc.cases) / static_cast<double>(cc.total);
    }
    return out;
}

IdentifiedMasses identified_masses(const CellRates& d) {
    return {1.0 - d[{1, 1}], d[{0, 0}]};
}

MonotonicityReport monotonicity_consistency(const CellRates& d) {
    MonotonicityReport rep;
    auto check = [&](ExposureCell lo, ExposureCell hi) {
        if (d[lo] > d[hi]) {
            rep.consistent = false;
            rep.violations.push_back("delta" + std::to_string(lo.z) + std::to_string(lo.m) + " <= delta" +
                                     std::to_string(hi.z) + std::to_string(hi.m));
        }
    };
    check({0, 0}, {0, 1});
    check({0, 1}, {1, 1});
    check({0, 0}, {1, 0});
    check({1, 0}, {1, 1});
    return rep;
}

CellCounts read_counts_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("counts CSV is empty");
    auto header = split_csv_line(line);
    if (header != std::vector<std::string>{"z", "m", "cases", "total"}) {
        throw InputError("counts CSV header must be 'z,m,cases,total'");
    }
    CellCounts counts;
    std::array<bool, 4> seen{};
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto f = split_csv_line(line);
        if (f.size() != 4) throw InputError("counts CSV row must have 4 fields: " + line);
        try {
            int z = std::stoi(f[0]);
            int m = std::stoi(f[1]);
            if ((z != 0 && z != 1) || (m != 0 && m != 1)) throw InputError("z and m must be 0 or 1");
            ExposureCell c{z, m};
            if (seen[c.index()]) throw InputError("duplicate exposure cell in counts CSV");
            seen[c.index()] = true;
            counts[c] = {std::stoll(f[2]), std::stoll(f[3])};
        } catch (const std::logic_error&) {
            throw InputError("non-numeric field in counts CSV row: " + line);
        }
    }
    for (bool s : seen) {
        if (!s) throw InputError("counts CSV must contain all four exposure cells");
    }
    return counts;
}

CellCounts read_counts_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open counts file: " + path);
    return read_counts_csv(in);
}

}  // namespace causattr
