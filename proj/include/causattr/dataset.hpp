#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causattr/cell_rates.hpp"
#include "causattr/latent_model.hpp"

namespace causattr {

struct UnitRecord {
    int z = 0;
    int m = 0;
    int y = 0;
    double w = 0.0;
    std::vector<double> x;  // leading intercept 1 included

    ExposureCell cell() const { return {z, m}; }
    Evidence evidence() const { return Evidence::of(z, m, y); }
};

class Dataset {
public:
    Dataset() = default;
    // Throws InputError on inconsistent covariate dimensions, non-binary
    // z/m/y, non-finite w or a missing intercept.
    explicit Dataset(std::vector<UnitRecord> records);

    const std::vector<UnitRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const UnitRecord& operator[](std::size_t i) const { return records_[i]; }

    // Covariate dimension p including the intercept (0 when empty).
    int dim() const { return records_.empty() ? 0 : static_cast<int>(records_.front().x.size()); }

    Eigen::MatrixXd design() const;  // n x p
    Eigen::VectorXd w() const;

    // Units per evidence stratum, indexed by Evidence::index().
    std::array<std::size_t, 8> stratum_sizes() const;
    CellCounts counts() const;

    // Rows selected by index, repeats allowed.
    Dataset subset(const std::vector<std::size_t>& rows) const;

private:
    std::vector<UnitRecord> records_;
};

// Dataset plus the generating latent class of every unit.
struct LabeledDataset {
    Dataset data;
    std::vector<LatentClass> labels;
};

// Header "z,m,y,w[,x1,...,xk][,g]". The intercept is added on read; a
// trailing g column carries ground-truth labels and is returned separately.
LabeledDataset read_dataset_csv(std::istream& in);
LabeledDataset read_dataset_csv_file(const std::string& path);

void write_dataset_csv(std::ostream& out, const Dataset& data,
                       const std::vector<LatentClass>* labels = nullptr);

}  // namespace causattr
