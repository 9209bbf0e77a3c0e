#pragma once

#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "momentlab/exponent.hpp"
#include "momentlab/expr.hpp"

namespace momentlab {

// Joint PMF P(X = a_i, Y = a_j) = p_ij on finitely many distinct atoms.
// Truncations of countable models carry the missing probability in
// tail_mass_bound so that sum(p) + tail = 1.
class DiscreteJoint {
public:
    DiscreteJoint(std::vector<double> atoms, Eigen::MatrixXd weights, double tail_mass_bound = 0.0);

    const std::vector<double>& atoms() const noexcept { return atoms_; }
    const Eigen::MatrixXd& weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    double tail_mass_bound() const noexcept { return tail_mass_bound_; }
    bool is_finite() const noexcept { return tail_mass_bound_ == 0.0; }
    // Set when the truncation left more than 1% of the mass unseen.
    bool tail_warning() const noexcept { return tail_mass_bound_ >= 0.01; }

    // Row sums, i.e. P(X = a_i); equal to the column sums by symmetry.
    std::vector<double> marginal() const;

private:
    std::vector<double> atoms_;
    Eigen::MatrixXd weights_;
    double tail_mass_bound_;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

// f(x, y) = d(x) d(y) / (c(x) + c(y))
struct CauchyKernel {
    Expr c;
    Expr d;
};

struct PiecewisePiece {
    double lo = 0.0;
    double hi = 0.0;
    double density = 0.0;
};

// f(x, y) = h(x) h(y) with h piecewise constant on disjoint pieces.
struct ProductKernel {
    std::vector<PiecewisePiece> marginal;
};

struct UniformComponent {
    double center = 0.0;
    double halfwidth = 0.0;
    double mass = 0.0;
};

// f(x, y) = sum_kl W_kl b_k(x) b_l(y), b_k the uniform density of component
// k. W is the outer product of the masses unless a joint matrix is given,
// which is how a discrete joint law is smoothed.
struct MixtureUniform {
    std::vector<UniformComponent> components;
    Eigen::MatrixXd joint;
};

using Kernel = std::variant<CauchyKernel, ProductKernel, MixtureUniform>;

class DensityModel {
public:
    DensityModel(std::vector<Interval> domain, Kernel kernel, double normalization_constant);

    const std::vector<Interval>& domain() const noexcept { return domain_; }
    const Kernel& kernel() const noexcept { return kernel_; }
    double normalization_constant() const noexcept { return normalization_; }

    // Normalized joint density; zero outside D^2.
    double density(double x, double y) const;
    // Density of X (equal to that of Y).
    double marginal_density(double x) const;
    bool is_product() const noexcept;

    double lower() const noexcept { return domain_.front().lo; }
    double upper() const noexcept { return domain_.back().hi; }

private:
    std::vector<Interval> domain_;
    Kernel kernel_;
    double normalization_;
};

struct TwoPointLaw {
    double high_atom; // A
    double low_atom;  // always -1
    double p;         // P(X = A)
    double q;         // P(X = -1)
    double r;
};

using Model = std::variant<DiscreteJoint, DensityModel>;

DiscreteJoint build_cauchy_discrete(std::span<const double> atoms, std::span<const double> c,
                                    std::span<const double> d, bool normalize);

DiscreteJoint build_general_discrete(std::span<const double> atoms, const Eigen::MatrixXd& weights);

// Cauchy-kernel model on indices 1..m from rules in the index variable `i`.
DiscreteJoint truncate_countable(const Expr& rule_a, const Expr& rule_c, const Expr& rule_d, int m);

TwoPointLaw build_counterexample(const RExponent& r);

// Independent copies of the law, i.e. the matrix [[p^2, pq], [pq, q^2]] on
// atoms (A, -1).
DiscreteJoint to_discrete(const TwoPointLaw& law);

// X_eps = Z + eps U with U uniform on [-1, 1]; requires 0 < eps < 1/2.
DensityModel build_smoothed(const TwoPointLaw& law, double epsilon);

// X, Y independent uniform on [1, 2].
DensityModel build_uniform_remark();

// Normalizes by a computed constant so that the double integral is 1.
DensityModel build_cauchy_density(const Expr& c, const Expr& d, std::vector<Interval> domain);

DensityModel build_product_density(std::vector<PiecewisePiece> pieces);

DensityModel build_mixture_density(std::vector<UniformComponent> components);

// Replaces every atom of the joint law by a uniform bump of half-width eps,
// keeping the joint weights.
DensityModel smooth_discrete(const DiscreteJoint& model, double epsilon);

} // namespace momentlab
