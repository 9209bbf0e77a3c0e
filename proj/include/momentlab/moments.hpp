#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "momentlab/exponent.hpp"
#include "momentlab/model.hpp"

namespace momentlab {

enum class Method { Exact, Quadrature, MonteCarlo };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

enum class Sign { Plus, Minus };

struct MomentEstimate {
    double value = 0.0;
    double abs_error_bound = 0.0;
    Method method = Method::Exact;
    // Terms summed, quadrature panels, or Monte Carlo samples.
    std::int64_t n = 0;
    std::optional<std::uint64_t> seed;
    // The bound includes an unverifiable truncation or smoothing term.
    bool heuristic_bound = false;
};

// Sum of p_ij |a_i +- a_j|^r in descending magnitude with compensation.
// For r < 0 a positive-mass zero of |a_i +- a_j| gives +inf.
MomentEstimate moment_discrete(const DiscreteJoint& model, const RExponent& r, Sign sign);

MomentEstimate expectation_xy(const DiscreteJoint& model);
MomentEstimate expectation_xy(const DensityModel& model, double rel_tol = 1e-10);

MomentEstimate moment_density_quadrature(const DensityModel& model, const RExponent& r, Sign sign,
                                         double rel_tol = 1e-8);

// Batched sampler; batches are seeded by (seed, batch index) and reduced in
// batch order, so the result does not depend on `workers`.
MomentEstimate moment_monte_carlo(const Model& model, const RExponent& r, Sign sign, std::int64_t n,
                                  std::uint64_t seed, unsigned workers = 1);

struct DeltaOptions {
    Method method = Method::Exact;
    double rel_tol = 1e-8;
    std::int64_t mc_samples = 1'000'000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    // Half-width used when a discrete model is integrated by quadrature.
    double smoothing_epsilon = 1e-3;
};

struct MomentPair {
    MomentEstimate plus;
    MomentEstimate minus;
    MomentEstimate delta;
};

// E|X+Y|^r, E|X-Y|^r and their difference with the two bounds added.
MomentPair moment_pair(const Model& model, const RExponent& r, const DeltaOptions& options);

MomentEstimate delta(const Model& model, const RExponent& r, const DeltaOptions& options);

// 99% two-sided normal quantile used for Monte Carlo intervals.
inline constexpr double kNormalQuantile99 = 2.5758293035489004;

} // namespace momentlab
