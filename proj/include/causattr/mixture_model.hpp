#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causattr/latent_model.hpp"

namespace causattr {

enum class Restriction { none, shared_means, shared_variances };

std::string to_string(Restriction r);
Restriction parse_restriction(const std::string& text);  // throws InputError

// Normal regression of W on x for one (cell, class) component.
struct ComponentParams {
    Eigen::VectorXd mu;
    double sigma2 = 1.0;
    bool active = false;  // false when the component's stratum has no units
};

// pr(G | X) as a softmax over the class set with the first class (0000) as
// reference, and f(W | Z, M, G, X) as one normal regression per component.
class MixtureModelParams {
public:
    MixtureModelParams() = default;
    MixtureModelParams(bool monotone, Restriction restriction, int dim);

    bool monotone() const { return monotone_; }
    Restriction restriction() const { return restriction_; }
    int dim() const { return dim_; }
    int n_classes() const { return static_cast<int>(classes_.size()); }
    const std::vector<LatentClass>& classes() const { return classes_; }
    LatentClass class_at(int k) const { return classes_[k]; }
    int class_index(LatentClass g) const;  // -1 when g is outside the class set

    // K x p; row 0 is the reference class and stays zero.
    Eigen::MatrixXd& theta() { return theta_; }
    const Eigen::MatrixXd& theta() const { return theta_; }

    ComponentParams& component(ExposureCell c, int k) { return components_[c.index() * n_classes() + k]; }
    const ComponentParams& component(ExposureCell c, int k) const {
        return components_[c.index() * n_classes() + k];
    }

    // Class indices compatible with evidence stratum e (0..7).
    const std::vector<int>& compatible(int evidence_index) const { return compatible_[evidence_index]; }

    // Throws ContractError when the invariants fail.
    void validate(double variance_floor = 0.0) const;

private:
    bool monotone_ = true;
    Restriction restriction_ = Restriction::none;
    int dim_ = 1;
    std::vector<LatentClass> classes_;
    Eigen::MatrixXd theta_;
    std::vector<ComponentParams> components_;
    std::array<std::vector<int>, 8> compatible_;
};

// Softmax over the model's class set. Throws ContractError on a dimension mismatch.
ClassDistribution class_prior(const MixtureModelParams& params, const Eigen::VectorXd& x);

// Log-softmax into out (size K).
void log_class_prior(const Eigen::MatrixXd& theta, const Eigen::Ref<const Eigen::VectorXd>& x,
                     Eigen::Ref<Eigen::VectorXd> out);

double normal_log_density(double w, double mean, double sigma2);

double component_log_density(const MixtureModelParams& params, ExposureCell cell, LatentClass g,
                             const Eigen::VectorXd& x, double w);
double component_density(const MixtureModelParams& params, ExposureCell cell, LatentClass g,
                         const Eigen::VectorXd& x, double w);

double log_sum_exp(const double* v, int n);

}  // namespace causattr
