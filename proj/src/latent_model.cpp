#include "causattr/latent_model.hpp"

#include <cmath>
#include <sstream>

#include "causattr/errors.hpp"

namespace causattr {

LatentClass LatentClass::parse(std::string_view bits) {
    if (bits.size() != 4) {
        throw InputError("latent class must be a 4-character bitstring, got '" +
                         std::string(bits) + "'");
    }
    int code = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw InputError("latent class must be a 4-character bitstring, got '" +
                             std::string(bits) + "'");
        }
        code = 2 * code + (c - '0');
    }
    return from_code(code);
}

std::string LatentClass::str() const {
    std::string out(4, '0');
    for (int i = 0; i < 4; ++i) {
        if ((code_ >> (3 - i)) & 1) out[i] = '1';
    }
    return out;
}

Evidence Evidence::parse(std::string_view text) {
    if (text == "empty" || text.empty()) return none();
    int vals[3];
    int n = 0;
    std::size_t pos = 0;
    while (pos <= text.size() && n < 4) {
        std::size_t comma = text.find(',', pos);
        std::string_view tok =
            text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        if (tok != "0" && tok != "1") {
            throw InputError("evidence must be 'z,m,y' with binary entries or 'empty', got '" +
                             std::string(text) + "'");
        }
        if (n < 3) vals[n] = tok[0] - '0';
        ++n;
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (n != 3) {
        throw InputError("evidence must be 'z,m,y' with binary entries or 'empty', got '" +
                         std::string(text) + "'");
    }
    return of(vals[0], vals[1], vals[2]);
}

std::string Evidence::str() const {
    if (empty()) return "empty";
    std::ostringstream os;
    os << cell().z << ',' << cell().m << ',' << y();
    return os.str();
}

std::array<Evidence, 8> all_evidence() {
    std::array<Evidence, 8> out;
    for (int i = 0; i < 8; ++i) out[i] = Evidence::from_index(i);
    return out;
}

double ClassDistribution::operator[](LatentClass g) const {
    auto it = probs_.find(g);
    return it == probs_.end() ? 0.0 : it->second;
}

double ClassDistribution::total() const {
    double s = 0.0;
    for (const auto& [g, p] : probs_) s += p;
    return s;
}

double ClassDistribution::entropy() const {
    double h = 0.0;
    for (const auto& [g, p] : probs_) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

void ClassDistribution::validate(const std::vector<LatentClass>& allowed, double tol) const {
    for (const auto& [g, p] : probs_) {
        if (!(p >= -tol)) {
            throw ContractError("negative probability " + std::to_string(p) + " for class " + g.str());
        }
        bool ok = false;
        for (LatentClass a : allowed) ok = ok || a == g;
        if (!ok && p != 0.0) {
            throw ContractError("class " + g.str() + " is outside the allowed class set");
        }
    }
    if (std::abs(total() - 1.0) > tol) {
        throw ContractError("class probabilities sum to " + std::to_string(total()));
    }
}

std::vector<LatentClass> enumerate_classes(bool monotone) {
    std::vector<LatentClass> out;
    for (int code = 0; code < 16; ++code) {
        LatentClass g = LatentClass::from_code(code);
        if (!monotone || g.is_monotone()) out.push_back(g);
    }
    return out;
}

std::vector<LatentClass> compatible_classes(Evidence ev, bool monotone) {
    if (ev.empty()) throw ContractError("compatible_classes requires non-empty evidence");
    std::vector<LatentClass> out;
    for (LatentClass g : enumerate_classes(monotone)) {
        if (outcome_under(g, ev.cell()) == ev.y()) out.push_back(g);
    }
    return out;
}

}  // namespace causattr
