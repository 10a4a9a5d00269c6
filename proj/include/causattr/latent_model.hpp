#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace causattr {

// Joint exposure level (z, m), both binary.
struct ExposureCell {
    int z = 0;
    int m = 0;

    constexpr ExposureCell() = default;
    constexpr ExposureCell(int z_, int m_) : z(z_), m(m_) {}

    // 0..3 in the order (0,0), (0,1), (1,0), (1,1).
    constexpr int index() const { return 2 * z + m; }
    static constexpr ExposureCell from_index(int i) { return {i / 2, i % 2}; }

    auto operator<=>(const ExposureCell&) const = default;
};

inline constexpr std::array<ExposureCell, 4> kAllCells{
    ExposureCell{0, 0}, ExposureCell{0, 1}, ExposureCell{1, 0}, ExposureCell{1, 1}};

// Potential-outcome pattern G = (Y00, Y01, Y10, Y11), stored as the 4-bit
// code 8r + 4s + 2t + u. The code doubles as the canonical ordering key.
class LatentClass {
public:
    constexpr LatentClass() = default;
    constexpr LatentClass(int r, int s, int t, int u)
        : code_(static_cast<std::uint8_t>(8 * r + 4 * s + 2 * t + u)) {}

    static constexpr LatentClass from_code(int code) {
        LatentClass g;
        g.code_ = static_cast<std::uint8_t>(code & 0xF);
        return g;
    }
    // Parses "0001"-style bitstrings; throws InputError otherwise.
    static LatentClass parse(std::string_view bits);

    constexpr int code() const { return code_; }
    constexpr int r() const { return (code_ >> 3) & 1; }
    constexpr int s() const { return (code_ >> 2) & 1; }
    constexpr int t() const { return (code_ >> 1) & 1; }
    constexpr int u() const { return code_ & 1; }

    // Chains Y00 <= Y01 <= Y11 and Y00 <= Y10 <= Y11.
    constexpr bool is_monotone() const {
        return r() <= s() && s() <= u() && r() <= t() && t() <= u();
    }

    std::string str() const;

    auto operator<=>(const LatentClass&) const = default;

private:
    std::uint8_t code_ = 0;
};

// Conditioning set O = (Z=z, M=m, Y=y), or the whole population when empty.
// Partial evidence is not representable.
class Evidence {
public:
    constexpr Evidence() = default;
    static constexpr Evidence none() { return Evidence{}; }
    static constexpr Evidence of(int z, int m, int y) {
        Evidence e;
        e.index_ = static_cast<std::int8_t>(4 * z + 2 * m + y);
        return e;
    }
    static constexpr Evidence of(ExposureCell cell, int y) { return of(cell.z, cell.m, y); }
    static constexpr Evidence from_index(int i) {
        Evidence e;
        e.index_ = static_cast<std::int8_t>(i);
        return e;
    }
    // Accepts "z,m,y" or "empty".
    static Evidence parse(std::string_view text);

    constexpr bool empty() const { return index_ < 0; }
    // Valid only for non-empty evidence; 0..7 as 4z + 2m + y.
    constexpr int index() const { return index_; }
    constexpr ExposureCell cell() const { return {(index_ >> 2) & 1, (index_ >> 1) & 1}; }
    constexpr int y() const { return index_ & 1; }

    std::string str() const;

    auto operator<=>(const Evidence&) const = default;

private:
    std::int8_t index_ = -1;
};

// All eight non-empty evidence values in index order.
std::array<Evidence, 8> all_evidence();

// Probability vector over latent classes, keyed in canonical order.
class ClassDistribution {
public:
    ClassDistribution() = default;
    explicit ClassDistribution(std::map<LatentClass, double> probs) : probs_(std::move(probs)) {}

    double operator[](LatentClass g) const;  // 0 for classes outside the support
    void set(LatentClass g, double p) { probs_[g] = p; }
    bool contains(LatentClass g) const { return probs_.count(g) != 0; }

    const std::map<LatentClass, double>& probs() const { return probs_; }
    std::size_t size() const { return probs_.size(); }
    auto begin() const { return probs_.begin(); }
    auto end() const { return probs_.end(); }

    double total() const;
    // Shannon entropy with 0 log 0 = 0.
    double entropy() const;

    // Throws ContractError unless all probabilities are >= -tol, they sum to
    // one within tol, and every supported class lies in `allowed`.
    void validate(const std::vector<LatentClass>& allowed, double tol = 1e-10) const;

private:
    std::map<LatentClass, double> probs_;
};

// monotone=false: all 16 classes; monotone=true: {0000,0001,0011,0101,0111,1111}.
std::vector<LatentClass> enumerate_classes(bool monotone);

// The bit of g selected by the exposure cell: (0,0)->r, (0,1)->s, (1,0)->t, (1,1)->u.
constexpr int outcome_under(LatentClass g, ExposureCell cell) {
    return (g.code() >> (3 - cell.index())) & 1;
}

// Classes from the model's class set whose outcome in ev's cell equals ev's y.
std::vector<LatentClass> compatible_classes(Evidence ev, bool monotone);

}  // namespace causattr
