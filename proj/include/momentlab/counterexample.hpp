#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "momentlab/exponent.hpp"
#include "momentlab/model.hpp"
#include "momentlab/moments.hpp"

namespace momentlab {

struct BreakdownValues {
    double e_plus = 0.0;
    double e_minus = 0.0;
    double delta = 0.0;
    double jensen_lhs = 0.0;         // (A+1)^r - (A-1)^r
    double jensen_rhs = 0.0;         // 2 r A^(r-1)
    double jensen_gap = 0.0;         // lhs - rhs, evaluated without cancellation
    double jensen_substituted = 0.0; // Delta with the Jensen bound plugged in
    double chain_bound = 0.0;        // 2^r (1 - r^2)
};

// Exact rationals rendered as "num/den", present when r and 2r/(r-2) are
// integers (r in {3, 4, 6}).
struct RationalBreakdown {
    std::string e_plus;
    std::string e_minus;
    std::string delta;
    std::string jensen_lhs;
    std::string jensen_rhs;
    std::string chain_bound;
    BreakdownValues values;
};

struct DeltaBreakdown {
    double r = 0.0;
    // Exact values when available, otherwise the floating-point path.
    BreakdownValues values;
    BreakdownValues floating;
    std::optional<RationalBreakdown> rational;
    bool exact = false;
};

// Throws RegimeError for r <= 2 and InvariantViolation if the chain
// Delta <= substituted < 2^r (1 - r^2) < 0 fails.
DeltaBreakdown delta_exact(const TwoPointLaw& law);

MomentEstimate smoothed_delta(const RExponent& r, double epsilon, double rel_tol = 1e-10);

// X, Y iid uniform on [1, 2] at negative r.
struct RemarkBreakdown {
    double r = 0.0;
    double e_plus = 0.0;
    double e_plus_bound = 0.0; // 2^r
    double e_minus = 0.0;      // +inf for r <= -1
    bool e_minus_infinite = false;
    std::optional<double> e_minus_quadrature;
    double delta = 0.0;
    bool fails = false;
};

RemarkBreakdown remark_negative_r(const RExponent& r);

struct TwoPointCandidate {
    double a;
    double p;
    double delta;
};

// Exact Delta for every law with atoms (a, -1) and masses (p, 1 - p) on the
// grid. Returns points with Delta < -1e-12 max(1, E|X+Y|^r), ascending.
std::vector<TwoPointCandidate> search_two_point(const RExponent& r, std::span<const double> a_grid,
                                                std::span<const double> p_grid);

// Delta for the iid two-point law on atoms (a, b) with P(a) = p.
double two_point_delta(double r, double a, double b, double p, double* e_plus = nullptr);

} // namespace momentlab
