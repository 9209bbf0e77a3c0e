#pragma once

#include <cstdint>

#include "momentlab/exponent.hpp"
#include "momentlab/model.hpp"

namespace momentlab {

// Frequency window t_low < |t| < t_high; from_n(n) gives (1/n, n).
class TruncationWindow {
public:
    TruncationWindow(double t_low, double t_high);
    static TruncationWindow from_n(std::int64_t n);

    double t_low() const noexcept { return t_low_; }
    double t_high() const noexcept { return t_high_; }

private:
    double t_low_;
    double t_high_;
};

// Supported exponent range for the representation, [0.05, 2).
inline constexpr double kRepresentationMinR = 0.05;

// C_r = Gamma(r + 1) sin(pi r / 2) / pi, for 0 < r < 2.
double cr_constant(const RExponent& r);

struct ReciprocalCheck {
    double integral;  // integral over R of (1 - cos u) / |u|^(r+1)
    double product;   // C_r * integral, ideally 1
    double tolerance; // tolerance actually applied
};

// Computes the defining integral of 1/C_r independently of the Gamma
// closed form. Throws ToleranceNotMet if |C_r * integral - 1| exceeds the
// tolerance, which is loosened to 1e-6 for r > 1.8.
ReciprocalCheck cr_reciprocal_check_detail(const RExponent& r, double rel_tol);
double cr_reciprocal_check(const RExponent& r, double rel_tol);

// Phi(z) = C_r * integral over the window (both signs of t) of
// (1 - cos(t z)) / |t|^(r+1). Refuses windows with t_high |z| > 1e6.
double phi_n(double z, const RExponent& r, const TruncationWindow& window);

struct TruncatedDelta {
    // 4 C_r * integral of Q(t) / t^(r+1) over (t_low, t_high).
    double integral_channel;
    // sum_ij p_ij [Phi(a_i + a_j) - Phi(a_i - a_j)].
    double expectation_channel;
    double tolerance;
};

// Both routes to E{Phi(X+Y) - Phi(X-Y)}; throws ChannelMismatch when they
// disagree by more than rel_tol times E|X+Y|^r + E|X-Y|^r.
TruncatedDelta truncated_delta_channels(const DiscreteJoint& model, const RExponent& r,
                                        const TruncationWindow& window, double rel_tol = 1e-8);

double truncated_delta(const DiscreteJoint& model, const RExponent& r, const TruncationWindow& window,
                       double rel_tol = 1e-8);

} // namespace momentlab
