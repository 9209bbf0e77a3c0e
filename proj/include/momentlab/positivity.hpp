#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "momentlab/model.hpp"

namespace momentlab {

enum class Verdict { Certified, NotFalsified, Falsified };

std::string_view to_string(Verdict verdict);

struct PositivityReport {
    Verdict verdict = Verdict::NotFalsified;
    // Probe vector (discrete) achieving the minimum, when one was found.
    std::optional<std::vector<double>> witness;
    // Human-readable description of the minimizing probe.
    std::string witness_description;
    double min_value = 0.0;
    std::string method;
    // Verdict concerns a truncation of a countable model only.
    bool truncated = false;
    std::optional<std::uint64_t> seed;
};

// Symmetric eigen-decomposition of the weight matrix. Certified when
// lambda_min >= -tol * ||P||_inf, falsified (eigenvector witness) otherwise.
PositivityReport check_psd_discrete(const DiscreteJoint& model, double tol = 1e-10);

// delta(x) = values[k] on the k-th cell of the real line cut at `cuts`
// (values.size() == cuts.size() + 1).
struct StepProbe {
    std::vector<double> cuts;
    std::vector<double> values;

    double operator()(double x) const;
    std::string describe() const;
};

using Probe = std::variant<Expr, StepProbe>;

// Double integral of delta(x) delta(y) f(x, y) over D^2.
double density_quadratic_form(const DensityModel& model, const Probe& probe, double rel_tol = 1e-10);

inline constexpr std::uint64_t kDefaultProbeSeed = 0x5eed5eedULL;

// Evaluates the quadratic form for every probe plus `grid` random sign
// probes. Product kernels and mixtures with a PSD component matrix are
// certified in closed form.
PositivityReport probe_density_positivity(const DensityModel& model, std::span<const Probe> probes, int grid = 64,
                                          double tol = 1e-10, std::uint64_t seed = kDefaultProbeSeed);
PositivityReport probe_density_positivity(const DensityModel& model, std::span<const Expr> probes, int grid = 64,
                                          double tol = 1e-10, std::uint64_t seed = kDefaultProbeSeed);

// Q(t) = sum_ij sin(t a_i) sin(t a_j) p_ij.
double sin_quadratic_form(const DiscreteJoint& model, double t);

// sum_ij eta_i eta_j / (c_i + c_j), the counting-measure Cauchy form.
double cauchy_positivity_witness(std::span<const double> c, std::span<const double> eta);

} // namespace momentlab
